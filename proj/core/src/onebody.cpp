#include "hfcheck/onebody.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace hfcheck {

namespace {

Momentum add(const Momentum& a, const Momentum& b) {
  Momentum r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Momentum negate(const Momentum& a) {
  Momentum r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

}  // namespace

ModeBasis::ModeBasis(int dim, int cutoff, int particles)
    : dim_(dim), cutoff_(cutoff), particles_(particles) {
  if (dim < 1) throw ValidationError("mode basis: dimension must be >= 1");
  if (cutoff < 0) throw ValidationError("mode basis: cutoff must be >= 0");
  if (particles < 1) throw ValidationError("mode basis: particle number must be >= 1");

  const int side = 2 * cutoff + 1;
  long long count = 1;
  for (int i = 0; i < dim; ++i) {
    count *= side;
    if (count > (1LL << 20)) throw CapacityError("mode basis: more than 2^20 modes");
  }
  if (particles > count) {
    throw CapacityError("mode basis: N = " + std::to_string(particles) + " exceeds mode count " +
                        std::to_string(count));
  }

  // Odometer over the cube; the last coordinate runs fastest, which is
  // lexicographic order.
  modes_.reserve(static_cast<std::size_t>(count));
  Momentum k(static_cast<std::size_t>(dim), -cutoff);
  for (long long n = 0; n < count; ++n) {
    modes_.push_back(k);
    for (int i = dim - 1; i >= 0; --i) {
      if (++k[static_cast<std::size_t>(i)] <= cutoff) break;
      k[static_cast<std::size_t>(i)] = -cutoff;
    }
  }

  negated_.resize(modes_.size());
  for (std::size_t m = 0; m < modes_.size(); ++m) negated_[m] = *index_of(negate(modes_[m]));

  hbar_ = std::pow(static_cast<double>(particles), -1.0 / static_cast<double>(dim));
}

std::optional<int> ModeBasis::index_of(const Momentum& k) const {
  if (static_cast<int>(k.size()) != dim_) return std::nullopt;
  const int side = 2 * cutoff_ + 1;
  int idx = 0;
  for (int c : k) {
    if (c < -cutoff_ || c > cutoff_) return std::nullopt;
    idx = idx * side + (c + cutoff_);
  }
  return idx;
}

std::optional<int> ModeBasis::shifted(int m, const Momentum& q) const {
  return index_of(add(mode(m), q));
}

double ModeBasis::norm_sq(int m) const {
  double s = 0.0;
  for (int c : mode(m)) s += static_cast<double>(c) * c;
  return s;
}

int ModeBasis::boundary_distance(int m) const {
  int mx = 0;
  for (int c : mode(m)) mx = std::max(mx, std::abs(c));
  return cutoff_ - mx;
}

ModeBasis build_basis(int dim, int cutoff, int particles) { return ModeBasis(dim, cutoff, particles); }

Potential::Potential(int dim, const std::vector<Term>& terms) : dim_(dim) {
  std::map<Momentum, double> given;
  for (const auto& t : terms) {
    if (static_cast<int>(t.p.size()) != dim) {
      throw ValidationError("potential: momentum " + to_string(t.p) + " has wrong dimension");
    }
    if (!std::isfinite(t.v)) throw ValidationError("potential: non-finite coefficient at " + to_string(t.p));
    auto [it, inserted] = given.emplace(t.p, t.v);
    if (!inserted) throw ValidationError("potential: duplicate momentum " + to_string(t.p));
  }
  for (const auto& [p, v] : given) {
    const Momentum mp = negate(p);
    auto other = given.find(mp);
    if (other != given.end() && other->second != v) {
      throw ValidationError("potential: v_p != v_{-p} at p = " + to_string(p));
    }
    coeffs_[p] = v;
    coeffs_[mp] = v;
  }
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (it->second == 0.0) {
      it = coeffs_.erase(it);
    } else {
      ++it;
    }
  }
  for (const auto& [p, v] : coeffs_) {
    double n2 = 0.0;
    for (int c : p) {
      n2 += static_cast<double>(c) * c;
      radius_ = std::max(radius_, std::abs(c));
    }
    const double w = 1.0 + std::sqrt(n2);
    q0_ += w * w * std::abs(v);
  }
}

double Potential::coefficient(const Momentum& p) const {
  auto it = coeffs_.find(p);
  return it == coeffs_.end() ? 0.0 : it->second;
}

OneBodyOperator kinetic(const ModeBasis& basis) {
  const int m = basis.size();
  const double h2 = basis.hbar() * basis.hbar();
  OneBodyOperator t = OneBodyOperator::Zero(m, m);
  for (int i = 0; i < m; ++i) t(i, i) = h2 * basis.norm_sq(i);
  return t;
}

OneBodyOperator momentum(const ModeBasis& basis, int axis) {
  if (axis < 0 || axis >= basis.dim()) throw ValidationError("momentum: axis out of range");
  const int m = basis.size();
  OneBodyOperator p = OneBodyOperator::Zero(m, m);
  for (int i = 0; i < m; ++i) p(i, i) = basis.hbar() * basis.mode(i)[static_cast<std::size_t>(axis)];
  return p;
}

OneBodyOperator translation(const ModeBasis& basis, const Momentum& alpha) {
  if (static_cast<int>(alpha.size()) != basis.dim()) throw ValidationError("translation: wrong dimension");
  const int m = basis.size();
  OneBodyOperator t = OneBodyOperator::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    if (auto j = basis.shifted(i, alpha)) t(*j, i) = 1.0;
  }
  return t;
}

OneBodyOperator multiplication(const ModeBasis& basis, const Potential& w) {
  const int m = basis.size();
  OneBodyOperator out = OneBodyOperator::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [p, v] : w.coefficients()) {
      if (auto j = basis.shifted(i, p)) out(*j, i) += v;
    }
  }
  return out;
}

cplx density_fourier(const ModeBasis& basis, const OneBodyOperator& omega, const Momentum& q) {
  cplx s = 0.0;
  for (int m = 0; m < basis.size(); ++m) {
    if (auto j = basis.shifted(m, q)) s += omega(*j, m);
  }
  return s;
}

OneBodyOperator direct_term(const ModeBasis& basis, const Potential& v, const OneBodyOperator& omega) {
  const int m = basis.size();
  OneBodyOperator d = OneBodyOperator::Zero(m, m);
  for (const auto& [p, vp] : v.coefficients()) {
    const cplx rho = density_fourier(basis, omega, p);
    if (rho == cplx(0.0)) continue;
    // D_{k+p, k} = v_p ρ̂(p)
    for (int k = 0; k < m; ++k) {
      if (auto j = basis.shifted(k, p)) d(*j, k) += vp * rho;
    }
  }
  return d;
}

OneBodyOperator exchange_term(const ModeBasis& basis, const Potential& v, const OneBodyOperator& omega) {
  const int m = basis.size();
  OneBodyOperator x = OneBodyOperator::Zero(m, m);
  for (const auto& [p, vp] : v.coefficients()) {
    // X_{k,k'} += v_p ω_{k-p, k'-p}; enumerate (k-p, k'-p) = (a, b) in the cube.
    std::vector<int> up(static_cast<std::size_t>(m), -1);
    for (int a = 0; a < m; ++a) {
      if (auto j = basis.shifted(a, p)) up[static_cast<std::size_t>(a)] = *j;
    }
    for (int b = 0; b < m; ++b) {
      const int kb = up[static_cast<std::size_t>(b)];
      if (kb < 0) continue;
      for (int a = 0; a < m; ++a) {
        const int ka = up[static_cast<std::size_t>(a)];
        if (ka < 0) continue;
        x(ka, kb) += vp * omega(a, b);
      }
    }
  }
  return x;
}

double trace_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues().sum();
}

double operator_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

OperatorNorms norms(const OneBodyOperator& a) {
  if (a.size() == 0) return {0.0, 0.0, 0.0};
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  return {s(0), s.norm(), s.sum()};
}

std::string to_string(const Momentum& k) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ')';
  return os.str();
}

}  // namespace hfcheck
