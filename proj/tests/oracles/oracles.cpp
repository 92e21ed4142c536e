#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// All grid points of a uniform periodic grid with g points per axis.
std::vector<std::vector<double>> grid(int dim, int g) {
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(static_cast<std::size_t>(dim), 0);
  while (true) {
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) x[i] = kTwoPi * idx[i] / g;
    pts.push_back(std::move(x));
    int i = dim - 1;
    while (i >= 0 && ++idx[i] == g) idx[i--] = 0;
    if (i < 0) break;
  }
  return pts;
}

double dot(const std::vector<int>& k, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += k[i] * x[i];
  return s;
}

cplx plane_wave(const std::vector<int>& k, const std::vector<double>& x) {
  return std::polar(std::pow(kTwoPi, -0.5 * static_cast<double>(k.size())), dot(k, x));
}

cplx potential_at(const std::vector<Coefficient>& v, const std::vector<double>& x) {
  cplx s = 0.0;
  for (const auto& c : v) s += c.v * std::polar(1.0, dot(c.p, x));
  return s;
}

int grid_size(int cutoff, const std::vector<Coefficient>& v) {
  int r = 0;
  for (const auto& c : v) {
    for (int comp : c.p) r = std::max(r, std::abs(comp));
  }
  return 2 * (2 * cutoff + r) + 3;
}

std::vector<double> minus(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

std::vector<std::vector<int>> modes(int dim, int cutoff) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(dim), -cutoff);
  while (true) {
    out.push_back(k);
    int i = dim - 1;
    while (i >= 0 && ++k[i] > cutoff) k[i--] = -cutoff;
    if (i < 0) break;
  }
  return out;
}

Mat direct_quadrature(int dim, int cutoff, const std::vector<Coefficient>& v, const Mat& omega) {
  const auto ks = modes(dim, cutoff);
  const int m = static_cast<int>(ks.size());
  const int g = grid_size(cutoff, v);
  const auto pts = grid(dim, g);
  const double w = std::pow(kTwoPi / g, dim);

  std::vector<cplx> rho(pts.size(), 0.0);
  for (std::size_t y = 0; y < pts.size(); ++y) {
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) rho[y] += omega(a, b) * plane_wave(ks[a], pts[y]) * std::conj(plane_wave(ks[b], pts[y]));
    }
  }
  std::vector<cplx> field(pts.size(), 0.0);
  for (std::size_t x = 0; x < pts.size(); ++x) {
    for (std::size_t y = 0; y < pts.size(); ++y) field[x] += w * potential_at(v, minus(pts[x], pts[y])) * rho[y];
  }
  Mat d = Mat::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      for (std::size_t x = 0; x < pts.size(); ++x) {
        d(k, l) += w * std::conj(plane_wave(ks[k], pts[x])) * field[x] * plane_wave(ks[l], pts[x]);
      }
    }
  }
  return d;
}

Mat exchange_quadrature(int dim, int cutoff, const std::vector<Coefficient>& v, const Mat& omega) {
  const auto ks = modes(dim, cutoff);
  const int m = static_cast<int>(ks.size());
  const int g = grid_size(cutoff, v);
  const auto pts = grid(dim, g);
  const double w = std::pow(kTwoPi / g, dim);
  const auto n = pts.size();

  // Kernel X(x;y) = V(x-y) ω(x;y) on the grid.
  Mat e(static_cast<Eigen::Index>(n), m);
  for (std::size_t x = 0; x < n; ++x) {
    for (int a = 0; a < m; ++a) e(static_cast<Eigen::Index>(x), a) = plane_wave(ks[a], pts[x]);
  }
  const Mat omega_grid = e * omega * e.adjoint();
  Mat kernel(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      kernel(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) =
          potential_at(v, minus(pts[x], pts[y])) * omega_grid(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  return (w * w) * (e.adjoint() * kernel * e);
}

Mat first_quantized_hamiltonian(int cutoff, double hbar, int particles, const std::vector<Coefficient>& v) {
  const int m = 2 * cutoff + 1;
  long dim = 1;
  for (int i = 0; i < particles; ++i) dim *= m;
  auto digits = [&](long s) {
    std::vector<int> d(static_cast<std::size_t>(particles));
    for (int i = particles - 1; i >= 0; --i) {
      d[i] = static_cast<int>(s % m);
      s /= m;
    }
    return d;
  };
  auto encode = [&](const std::vector<int>& d) {
    long s = 0;
    for (int x : d) s = s * m + x;
    return s;
  };

  Mat h = Mat::Zero(dim, dim);
  for (long s = 0; s < dim; ++s) {
    const auto c = digits(s);
    for (int i = 0; i < particles; ++i) {
      const double k = c[i] - cutoff;
      h(s, s) += hbar * hbar * k * k;
    }
    for (int i = 0; i < particles; ++i) {
      for (int j = i + 1; j < particles; ++j) {
        for (const auto& term : v) {
          const int p = term.p[0];
          auto a = c;
          a[i] += p;  // x_i gains p
          a[j] -= p;  // x_j loses p
          if (a[i] < 0 || a[i] >= m || a[j] < 0 || a[j] >= m) continue;
          h(encode(a), s) += term.v / particles;
        }
      }
    }
  }
  return h;
}

Vec antisymmetrized(const Mat& orbitals) {
  const auto m = orbitals.rows();
  const auto n = orbitals.cols();
  long dim = 1;
  for (Eigen::Index i = 0; i < n; ++i) dim *= m;
  Vec out = Vec::Zero(dim);
  double fact = 1.0;
  for (Eigen::Index i = 2; i <= n; ++i) fact *= static_cast<double>(i);
  for (long s = 0; s < dim; ++s) {
    Mat sub(n, n);
    long rest = s;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      const auto x = rest % m;
      rest /= m;
      sub.row(i) = orbitals.row(x);  // sub(i, j) = φ_j(x_i)
    }
    out(s) = sub.determinant() / std::sqrt(fact);
  }
  return out;
}

Mat determinant_matrix(const Mat& h, int modes, const std::vector<unsigned>& states) {
  std::vector<Vec> dets;
  for (unsigned s : states) {
    std::vector<int> occ;
    for (int j = 0; j < modes; ++j) {
      if (s >> j & 1u) occ.push_back(j);
    }
    Mat c = Mat::Zero(modes, static_cast<Eigen::Index>(occ.size()));
    for (std::size_t i = 0; i < occ.size(); ++i) c(occ[i], static_cast<Eigen::Index>(i)) = 1.0;
    dets.push_back(antisymmetrized(c));
  }
  const auto n = static_cast<Eigen::Index>(states.size());
  Mat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vec hj = h * dets[j];
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = dets[i].dot(hj);
  }
  return out;
}

Mat jordan_wigner_annihilator(int modes, int j) {
  Mat lower(2, 2), z(2, 2), id = Mat::Identity(2, 2);
  lower << 0, 1, 0, 0;
  z << 1, 0, 0, -1;
  auto kron = [](const Mat& a, const Mat& b) {
    Mat k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) k.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
    return k;
  };
  // Leftmost factor is the most significant bit (mode M-1).
  Mat out = Mat::Identity(1, 1);
  for (int mode = modes - 1; mode >= 0; --mode) out = kron(out, mode > j ? id : (mode == j ? lower : z));
  return out;
}

double trace_norm(const Mat& c) {
  // Eigenvalues of the Hermitian dilation [[0, C], [C^*, 0]] are ±σ_i.
  const auto r = c.rows();
  const auto k = c.cols();
  Mat dil = Mat::Zero(r + k, r + k);
  dil.topRightCorner(r, k) = c;
  dil.bottomLeftCorner(k, r) = c.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(dil, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace oracle
