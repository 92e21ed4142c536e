#include "hfcheck/fockspace.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace hfcheck {

namespace {

using Triplet = Eigen::Triplet<cplx>;

constexpr FockState bit(int j) { return FockState{1} << j; }

FockOperator from_triplets(const FockBasis& fb, std::vector<Triplet>& t) {
  const auto n = static_cast<Eigen::Index>(fb.dim());
  FockOperator op(n, n);
  op.setFromTriplets(t.begin(), t.end());
  op.prune(cplx(0.0));
  return op;
}

void check_modes(const FockBasis& fb, Eigen::Index rows, const char* what) {
  if (rows != fb.modes()) throw ValidationError(std::string(what) + ": mode count mismatch");
}

}  // namespace

FockBasis::FockBasis(int modes) : modes_(modes) {
  if (modes < 0 || modes > kMaxModes) {
    throw CapacityError("fock basis: mode count " + std::to_string(modes) + " outside [0, " +
                        std::to_string(kMaxModes) + "]");
  }
  sectors_.resize(static_cast<std::size_t>(modes) + 1);
  position_.resize(dim());
  for (FockState s = 0; s < dim(); ++s) {
    auto& sec = sectors_[static_cast<std::size_t>(particle_number(s))];
    position_[s] = sec.size();
    sec.push_back(s);
  }
}

FockVector FockBasis::vacuum() const {
  FockVector v = FockVector::Zero(static_cast<Eigen::Index>(dim()));
  v(0) = 1.0;
  return v;
}

OrbitalSet::OrbitalSet(Eigen::MatrixXcd coefficients, double tol) : coeffs_(std::move(coefficients)) {
  if (coeffs_.cols() > coeffs_.rows()) throw CapacityError("orbital set: more orbitals than modes");
  if (!coeffs_.allFinite()) throw ValidationError("orbital set: non-finite coefficients");
  if (coeffs_.cols() == 0) return;
  const Eigen::MatrixXcd gram = coeffs_.adjoint() * coeffs_;
  const double defect =
      (gram - Eigen::MatrixXcd::Identity(coeffs_.cols(), coeffs_.cols())).cwiseAbs().maxCoeff();
  if (defect > tol) {
    throw ValidationError("orbital set: orbitals not orthonormal (Gram defect " + std::to_string(defect) + ")");
  }
}

OneBodyOperator OrbitalSet::particle_projector() const {
  return OneBodyOperator::Identity(modes(), modes()) - density();
}

Eigen::MatrixXcd OrbitalSet::completion() const {
  const int m = modes();
  const int n = count();
  Eigen::MatrixXcd basis(m, m);
  basis.leftCols(n) = coeffs_;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (int filled = n; filled < m; ++filled) {
    // Pick the mode with the largest residual against the current span.
    int best = -1;
    double best_norm = -1.0;
    ModeVector best_vec;
    for (int k = 0; k < m; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      ModeVector v = ModeVector::Unit(m, k);
      for (int pass = 0; pass < 2; ++pass) {
        v -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * v);
      }
      const double nv = v.norm();
      if (nv > best_norm + 1e-12) {
        best = k;
        best_norm = nv;
        best_vec = std::move(v);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    basis.col(filled) = best_vec / best_norm;
  }
  return basis.rightCols(m - n);
}

OneBodyOperator hole_kernel(const ModeBasis& basis, const OrbitalSet& orbitals) {
  const int m = basis.size();
  if (orbitals.modes() != m) throw ValidationError("hole_kernel: mode count mismatch");
  // Q_{k,k'} = Σ_j c_j(k) conj((conj φ_j)_{k'}) = Σ_j c_j(k) c_j(-k')
  OneBodyOperator q = OneBodyOperator::Zero(m, m);
  const auto& c = orbitals.coefficients();
  for (int kp = 0; kp < m; ++kp) {
    const int neg = basis.negated(kp);
    for (int j = 0; j < orbitals.count(); ++j) q.col(kp) += c(neg, j) * c.col(j);
  }
  return q;
}

void add_create(const FockBasis& fb, const ModeVector& f, const FockVector& in, FockVector& out, cplx scale) {
  check_modes(fb, f.size(), "add_create");
  const int m = fb.modes();
  const auto dim = static_cast<FockState>(fb.dim());
  for (FockState s = 0; s < dim; ++s) {
    const cplx c = in(s);
    if (c == cplx(0.0)) continue;
    const cplx sc = scale * c;
    for (int j = 0; j < m; ++j) {
      if (s & bit(j) || f(j) == cplx(0.0)) continue;
      out(s | bit(j)) += fermion_sign(s, j) * f(j) * sc;
    }
  }
}

void add_annihilate(const FockBasis& fb, const ModeVector& f, const FockVector& in, FockVector& out,
                    cplx scale) {
  check_modes(fb, f.size(), "add_annihilate");
  const int m = fb.modes();
  const auto dim = static_cast<FockState>(fb.dim());
  for (FockState s = 0; s < dim; ++s) {
    const cplx c = in(s);
    if (c == cplx(0.0)) continue;
    const cplx sc = scale * c;
    for (int j = 0; j < m; ++j) {
      if (!(s & bit(j)) || f(j) == cplx(0.0)) continue;
      out(s ^ bit(j)) += fermion_sign(s, j) * std::conj(f(j)) * sc;
    }
  }
}

void add_annihilate_mode(const FockBasis& fb, int j, const FockVector& in, FockVector& out, cplx scale) {
  const auto dim = static_cast<FockState>(fb.dim());
  for (FockState s = 0; s < dim; ++s) {
    if (!(s & bit(j))) continue;
    out(s ^ bit(j)) += fermion_sign(s, j) * scale * in(s);
  }
}

FockVector apply_create(const FockBasis& fb, const ModeVector& f, const FockVector& in) {
  FockVector out = FockVector::Zero(in.size());
  add_create(fb, f, in, out);
  return out;
}

FockVector apply_annihilate(const FockBasis& fb, const ModeVector& f, const FockVector& in) {
  FockVector out = FockVector::Zero(in.size());
  add_annihilate(fb, f, in, out);
  return out;
}

FockVector apply_dgamma(const FockBasis& fb, const OneBodyOperator& a, const FockVector& in) {
  check_modes(fb, a.rows(), "apply_dgamma");
  const int m = fb.modes();
  const auto dim = static_cast<FockState>(fb.dim());
  FockVector out = FockVector::Zero(in.size());
  for (FockState s = 0; s < dim; ++s) {
    const cplx c = in(s);
    if (c == cplx(0.0)) continue;
    for (int n = 0; n < m; ++n) {
      if (!(s & bit(n))) continue;
      const FockState s1 = s ^ bit(n);
      const double sg1 = fermion_sign(s, n);
      for (int k = 0; k < m; ++k) {
        if (s1 & bit(k) || a(k, n) == cplx(0.0)) continue;
        out(s1 | bit(k)) += sg1 * fermion_sign(s1, k) * a(k, n) * c;
      }
    }
  }
  return out;
}

FockVector apply_number(const FockBasis& fb, const FockVector& in) {
  FockVector out(in.size());
  for (FockState s = 0; s < fb.dim(); ++s) out(s) = static_cast<double>(particle_number(s)) * in(s);
  return out;
}

double number_expectation(const FockBasis& fb, const FockVector& psi) {
  double acc = 0.0;
  for (FockState s = 0; s < fb.dim(); ++s) acc += particle_number(s) * std::norm(psi(s));
  return acc;
}

FockOperator create(const FockBasis& fb, int j) {
  if (j < 0 || j >= fb.modes()) throw ValidationError("create: mode index out of range");
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    if (!(s & bit(j))) t.emplace_back(s | bit(j), s, fermion_sign(s, j));
  }
  return from_triplets(fb, t);
}

FockOperator annihilate(const FockBasis& fb, int j) {
  if (j < 0 || j >= fb.modes()) throw ValidationError("annihilate: mode index out of range");
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    if (s & bit(j)) t.emplace_back(s ^ bit(j), s, fermion_sign(s, j));
  }
  return from_triplets(fb, t);
}

FockOperator smear_create(const FockBasis& fb, const ModeVector& f) {
  check_modes(fb, f.size(), "smear_create");
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    for (int j = 0; j < fb.modes(); ++j) {
      if (!(s & bit(j)) && f(j) != cplx(0.0)) t.emplace_back(s | bit(j), s, fermion_sign(s, j) * f(j));
    }
  }
  return from_triplets(fb, t);
}

FockOperator smear_annihilate(const FockBasis& fb, const ModeVector& f) {
  check_modes(fb, f.size(), "smear_annihilate");
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    for (int j = 0; j < fb.modes(); ++j) {
      if ((s & bit(j)) && f(j) != cplx(0.0)) {
        t.emplace_back(s ^ bit(j), s, fermion_sign(s, j) * std::conj(f(j)));
      }
    }
  }
  return from_triplets(fb, t);
}

FockOperator number_operator(const FockBasis& fb) {
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    if (s) t.emplace_back(s, s, static_cast<double>(particle_number(s)));
  }
  return from_triplets(fb, t);
}

FockOperator dgamma(const FockBasis& fb, const OneBodyOperator& a) {
  check_modes(fb, a.rows(), "dgamma");
  const int m = fb.modes();
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    for (int n = 0; n < m; ++n) {
      if (!(s & bit(n))) continue;
      const FockState s1 = s ^ bit(n);
      const double sg1 = fermion_sign(s, n);
      for (int k = 0; k < m; ++k) {
        if (s1 & bit(k) || a(k, n) == cplx(0.0)) continue;
        t.emplace_back(s1 | bit(k), s, sg1 * fermion_sign(s1, k) * a(k, n));
      }
    }
  }
  return from_triplets(fb, t);
}

FockOperator pair_annihilate(const FockBasis& fb, const OneBodyOperator& a) {
  check_modes(fb, a.rows(), "pair_annihilate");
  const int m = fb.modes();
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    for (int n = 0; n < m; ++n) {
      if (!(s & bit(n))) continue;
      const FockState s1 = s ^ bit(n);
      const double sg1 = fermion_sign(s, n);
      for (int k = 0; k < m; ++k) {
        if (!(s1 & bit(k)) || a(k, n) == cplx(0.0)) continue;
        t.emplace_back(s1 ^ bit(k), s, sg1 * fermion_sign(s1, k) * a(k, n));
      }
    }
  }
  return from_triplets(fb, t);
}

FockOperator pair_create(const FockBasis& fb, const OneBodyOperator& a) {
  check_modes(fb, a.rows(), "pair_create");
  const int m = fb.modes();
  std::vector<Triplet> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    for (int n = 0; n < m; ++n) {
      if (s & bit(n)) continue;
      const FockState s1 = s | bit(n);
      const double sg1 = fermion_sign(s, n);
      for (int k = 0; k < m; ++k) {
        if (s1 & bit(k) || a(k, n) == cplx(0.0)) continue;
        t.emplace_back(s1 | bit(k), s, sg1 * fermion_sign(s1, k) * a(k, n));
      }
    }
  }
  return from_triplets(fb, t);
}

FockVector slater(const FockBasis& fb, const OrbitalSet& orbitals) {
  check_modes(fb, orbitals.modes(), "slater");
  FockVector psi = fb.vacuum();
  for (int j = orbitals.count() - 1; j >= 0; --j) psi = apply_create(fb, orbitals.orbital(j), psi);
  return psi;
}

namespace {

// (a*(f) + a(f)) ψ
FockVector apply_field(const FockBasis& fb, const ModeVector& f, const FockVector& psi) {
  FockVector out = FockVector::Zero(psi.size());
  add_create(fb, f, psi, out);
  add_annihilate(fb, f, psi, out);
  return out;
}

}  // namespace

FockVector apply_particle_hole(const FockBasis& fb, const OrbitalSet& orbitals, const FockVector& psi) {
  check_modes(fb, orbitals.modes(), "apply_particle_hole");
  FockVector out = psi;
  for (int j = orbitals.count() - 1; j >= 0; --j) out = apply_field(fb, orbitals.orbital(j), out);
  return out;
}

FockVector apply_particle_hole_adjoint(const FockBasis& fb, const OrbitalSet& orbitals,
                                       const FockVector& psi) {
  check_modes(fb, orbitals.modes(), "apply_particle_hole_adjoint");
  FockVector out = psi;
  for (int j = 0; j < orbitals.count(); ++j) out = apply_field(fb, orbitals.orbital(j), out);
  return out;
}

FockOperator particle_hole(const FockBasis& fb, const OrbitalSet& orbitals) {
  std::vector<Triplet> t;
  const auto dim = static_cast<Eigen::Index>(fb.dim());
  for (Eigen::Index col = 0; col < dim; ++col) {
    const FockVector c = apply_particle_hole(fb, orbitals, FockVector::Unit(dim, col));
    for (Eigen::Index row = 0; row < dim; ++row) {
      if (std::abs(c(row)) > 0.0) t.emplace_back(row, col, c(row));
    }
  }
  return from_triplets(fb, t);
}

Eigen::MatrixXcd particle_hole_dense(const FockBasis& fb, const OrbitalSet& orbitals) {
  const auto dim = static_cast<Eigen::Index>(fb.dim());
  Eigen::MatrixXcd r(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    r.col(col) = apply_particle_hole(fb, orbitals, FockVector::Unit(dim, col));
  }
  return r;
}

ConjugationResiduals conjugation_rule_check(const FockBasis& fb, const OrbitalSet& orbitals) {
  const int n = orbitals.count();
  const Eigen::MatrixXcd r = particle_hole_dense(fb, orbitals);
  Eigen::MatrixXcd all(orbitals.modes(), orbitals.modes());
  all.leftCols(n) = orbitals.coefficients();
  all.rightCols(orbitals.modes() - n) = orbitals.completion();

  const double odd = (n % 2) ? -1.0 : 1.0;  // (-1)^N
  ConjugationResiduals res{0.0, 0.0};
  for (int j = 0; j < all.cols(); ++j) {
    const ModeVector f = all.col(j);
    const Eigen::MatrixXcd ad = Eigen::MatrixXcd(smear_create(fb, f));
    const Eigen::MatrixXcd expected =
        j < n ? Eigen::MatrixXcd(-odd * Eigen::MatrixXcd(smear_annihilate(fb, f))) : Eigen::MatrixXcd(odd * ad);
    res.forward = std::max(res.forward, operator_norm(r * ad * r.adjoint() - expected));
    res.backward = std::max(res.backward, operator_norm(r.adjoint() * ad * r - expected));
  }
  return res;
}

double ph_field_conjugation_check(const FockBasis& fb, const ModeBasis& basis, const OrbitalSet& orbitals) {
  check_modes(fb, basis.size(), "ph_field_conjugation_check");
  const Eigen::MatrixXcd r = particle_hole_dense(fb, orbitals);
  const OneBodyOperator p = orbitals.particle_projector();
  const OneBodyOperator q = hole_kernel(basis, orbitals);
  const double sign = (orbitals.count() % 2) ? -1.0 : 1.0;

  double worst = 0.0;
  for (int m = 0; m < basis.size(); ++m) {
    const Eigen::MatrixXcd lhs = r.adjoint() * annihilate(fb, m) * r;
    const FockOperator field =
        smear_annihilate(fb, p.col(m)) - smear_create(fb, q.col(basis.negated(m)));
    const Eigen::MatrixXcd rhs = sign * Eigen::MatrixXcd(field);
    worst = std::max(worst, operator_norm(lhs - rhs));
  }
  return worst;
}

OneBodyOperator one_pdm(const FockBasis& fb, const FockVector& psi) {
  const int m = fb.modes();
  std::vector<FockVector> lowered(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    lowered[static_cast<std::size_t>(j)] = FockVector::Zero(psi.size());
    add_annihilate_mode(fb, j, psi, lowered[static_cast<std::size_t>(j)]);
  }
  OneBodyOperator g(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b <= a; ++b) {
      // γ_{a,b} = <a_b ψ, a_a ψ>
      const cplx v = lowered[static_cast<std::size_t>(b)].dot(lowered[static_cast<std::size_t>(a)]);
      g(a, b) = v;
      g(b, a) = std::conj(v);
    }
  }
  return g;
}

void write_dense(std::ostream& os, const Eigen::MatrixXcd& a) {
  const auto old = os.precision(17);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      os << (j ? " " : "") << a(i, j).real() << ',' << a(i, j).imag();
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace hfcheck
