#include "hfcheck/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace hfcheck {

FluctuationSnapshot fluctuation_state(const FockBasis& fb, const OrbitalSet& orbitals_t, const FockVector& psi_t,
                                      double t) {
  FluctuationSnapshot snap;
  snap.t = t;
  snap.xi = apply_particle_hole_adjoint(fb, orbitals_t, psi_t);
  snap.norm = snap.xi.norm();
  snap.number_plus_one = number_expectation(fb, snap.xi) + snap.xi.squaredNorm();
  return snap;
}

TraceDistance trace_distance_check(const FockBasis& fb, const FockVector& psi_t, const OneBodyOperator& omega_t,
                                   int particles, double number_plus_one) {
  const OneBodyOperator gamma = one_pdm(fb, psi_t);
  return {trace_norm(gamma - omega_t), (2.0 + 4.0 * std::sqrt(static_cast<double>(particles))) * number_plus_one};
}

FluctuationTerms::FluctuationTerms(const ModeBasis& basis, const Potential& potential, const OrbitalSet& orbitals)
    : basis_(basis),
      potential_(potential),
      fock_(basis.size()),
      p_(orbitals.particle_projector()),
      q_(hole_kernel(basis, orbitals)) {}

// In all three terms a*(P e_k) etc. denote smeared fields with the k-th
// column of P (or Q); a*(P_x) = Σ_k a*(P e_k) conj(e_k(x)) and
// a(P_y) = Σ_k a(P e_k) e_k(y).

FockVector FluctuationTerms::apply_a(const FockVector& xi) const {
  // A = (1/2N) Σ_p v_p Σ_{k1+k4=p} Σ_{k2+k3=-p} a*(P e_k1) a*(P e_k2) a*(Q e_k3) a*(Q e_k4)
  const int m = basis_.size();
  const double pref = 1.0 / (2.0 * basis_.particles());
  FockVector out = FockVector::Zero(xi.size());
  for (const auto& [p, v] : potential_.coefficients()) {
    Momentum minus_p(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) minus_p[i] = -p[i];
    for (int k1 = 0; k1 < m; ++k1) {
      const auto k4 = basis_.shifted(basis_.negated(k1), p);
      if (!k4) continue;
      const FockVector v1 = apply_create(fock_, q_.col(*k4), xi);
      FockVector w = FockVector::Zero(xi.size());
      for (int k2 = 0; k2 < m; ++k2) {
        const auto k3 = basis_.shifted(basis_.negated(k2), minus_p);
        if (!k3) continue;
        add_create(fock_, p_.col(k2), apply_create(fock_, q_.col(*k3), v1), w);
      }
      add_create(fock_, p_.col(k1), w, out, pref * v);
    }
  }
  return out;
}

FockVector FluctuationTerms::apply_b(const FockVector& xi) const {
  // B = (1/N) Σ_p v_p Σ_{k1+k3=p} Σ_{k2} a*(P e_k1) a*(P e_k2) a*(Q e_k3) a(P e_{k2+p})
  const int m = basis_.size();
  const double pref = 1.0 / basis_.particles();
  FockVector out = FockVector::Zero(xi.size());
  for (const auto& [p, v] : potential_.coefficients()) {
    // The lowered vectors a(P e_{k2+p}) ξ do not depend on k1; cache them.
    std::vector<FockVector> lowered(static_cast<std::size_t>(m));
    std::vector<bool> has(static_cast<std::size_t>(m), false);
    for (int k2 = 0; k2 < m; ++k2) {
      if (const auto k4 = basis_.shifted(k2, p)) {
        lowered[static_cast<std::size_t>(k2)] = apply_annihilate(fock_, p_.col(*k4), xi);
        has[static_cast<std::size_t>(k2)] = true;
      }
    }
    for (int k1 = 0; k1 < m; ++k1) {
      const auto k3 = basis_.shifted(basis_.negated(k1), p);
      if (!k3) continue;
      FockVector w = FockVector::Zero(xi.size());
      for (int k2 = 0; k2 < m; ++k2) {
        if (!has[static_cast<std::size_t>(k2)]) continue;
        add_create(fock_, p_.col(k2), apply_create(fock_, q_.col(*k3), lowered[static_cast<std::size_t>(k2)]), w);
      }
      add_create(fock_, p_.col(k1), w, out, pref * v);
    }
  }
  return out;
}

FockVector FluctuationTerms::apply_c(const FockVector& xi) const {
  // C = (1/N) Σ_p v_p Σ_{k1+k2=p} Σ_{k3} a*(P e_k1) a*(Q e_k2) a*(Q e_k3) a(Q e_{k3+p})
  const int m = basis_.size();
  const double pref = 1.0 / basis_.particles();
  FockVector out = FockVector::Zero(xi.size());
  for (const auto& [p, v] : potential_.coefficients()) {
    FockVector inner = FockVector::Zero(xi.size());
    for (int k3 = 0; k3 < m; ++k3) {
      const auto k4 = basis_.shifted(k3, p);
      if (!k4) continue;
      add_create(fock_, q_.col(k3), apply_annihilate(fock_, q_.col(*k4), xi), inner);
    }
    for (int k1 = 0; k1 < m; ++k1) {
      const auto k2 = basis_.shifted(basis_.negated(k1), p);
      if (!k2) continue;
      add_create(fock_, p_.col(k1), apply_create(fock_, q_.col(*k2), inner), out, pref * v);
    }
  }
  return out;
}

FockVector FluctuationTerms::apply_growth(const FockVector& xi) const {
  return 4.0 * apply_a(xi) + 2.0 * apply_b(xi) + 2.0 * apply_c(xi);
}

template <class Fn>
Eigen::MatrixXcd FluctuationTerms::dense(Fn&& apply) const {
  const auto dim = static_cast<Eigen::Index>(fock_.dim());
  Eigen::MatrixXcd out(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) out.col(c) = apply(FockVector::Unit(dim, c));
  return out;
}

Eigen::MatrixXcd FluctuationTerms::dense_a() const {
  return dense([this](const FockVector& v) { return apply_a(v); });
}

Eigen::MatrixXcd FluctuationTerms::dense_bc() const {
  return dense([this](const FockVector& v) { return FockVector(apply_b(v) + apply_c(v)); });
}

double number_derivative_direct(const FluctuationTerms& terms, const FockVector& xi, double hbar) {
  return 2.0 / hbar * xi.dot(terms.apply_growth(xi)).imag();
}

OrbitalStencil orbital_stencil(const HartreeFock& model, const Eigen::MatrixXcd& orbitals_t, double delta,
                               int substeps) {
  // RK4 is norm-preserving only to O(δ^5); the Gram tolerance is loosened
  // accordingly for the shifted sets.
  constexpr double kTol = 1e-8;
  return OrbitalStencil{OrbitalSet(propagate_fixed(model, orbitals_t, -delta, substeps), kTol),
                        OrbitalSet(orbitals_t, kTol),
                        OrbitalSet(propagate_fixed(model, orbitals_t, delta, substeps), kTol)};
}

Eigen::MatrixXcd generator(const ManyBodyHamiltonian& h, const OrbitalStencil& stencil, double delta) {
  const FockBasis& fb = h.fock;
  const Eigen::MatrixXcd r = particle_hole_dense(fb, stencil.center);
  const Eigen::MatrixXcd r_plus = particle_hole_dense(fb, stencil.plus);
  const Eigen::MatrixXcd r_minus = particle_hole_dense(fb, stencil.minus);
  const cplx ih(0.0, h.hbar);
  const Eigen::MatrixXcd dr_adj = (r_plus.adjoint() - r_minus.adjoint()) / (2.0 * delta);
  const Eigen::MatrixXcd hr = h.matrix * r;
  return ih * dr_adj * r + r.adjoint() * hr;
}

double BlockReport::worst() const {
  return std::max({a_residual, bc_residual, a_adj_residual, bc_adj_residual, stray, m_commutator});
}

Eigen::MatrixXcd shift_block(const FockBasis& fb, const Eigen::MatrixXcd& op, int shift) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(op.rows(), op.cols());
  for (Eigen::Index c = 0; c < op.cols(); ++c) {
    const int nc = particle_number(static_cast<FockState>(c));
    for (Eigen::Index r = 0; r < op.rows(); ++r) {
      if (particle_number(static_cast<FockState>(r)) - nc == shift) out(r, c) = op(r, c);
    }
  }
  (void)fb;
  return out;
}

BlockReport generator_block_decomposition(const FockBasis& fb, const Eigen::MatrixXcd& generator,
                                          const FluctuationTerms& terms) {
  BlockReport rep;
  const Eigen::MatrixXcd a = terms.dense_a();
  const Eigen::MatrixXcd bc = terms.dense_bc();
  rep.a_norm = a.norm();
  rep.bc_norm = bc.norm();
  rep.a_residual = (shift_block(fb, generator, 4) - a).norm();
  rep.bc_residual = (shift_block(fb, generator, 2) - bc).norm();
  rep.a_adj_residual = (shift_block(fb, generator, -4) - a.adjoint()).norm();
  rep.bc_adj_residual = (shift_block(fb, generator, -2) - bc.adjoint()).norm();
  double stray_sq = 0.0;
  for (int s = -fb.modes(); s <= fb.modes(); ++s) {
    if (s == 0 || s == 2 || s == -2 || s == 4 || s == -4) continue;
    stray_sq += shift_block(fb, generator, s).squaredNorm();
  }
  rep.stray = std::sqrt(stray_sq);
  rep.hermiticity = (generator - generator.adjoint()).norm();
  const Eigen::MatrixXcd mblock = shift_block(fb, generator, 0);
  const Eigen::MatrixXcd number = Eigen::MatrixXcd(number_operator(fb));
  rep.m_commutator = (mblock * number - number * mblock).norm();
  return rep;
}

std::vector<double> grid_derivative(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (y.size() != n) throw ValidationError("grid_derivative: size mismatch");
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  // Three-point Lagrange derivative at the middle node or at an end node.
  auto three = [](double x0, double x1, double x2, double y0, double y1, double y2, double at) {
    const double l0 = ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2));
    const double l1 = ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2));
    const double l2 = ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1));
    return l0 * y0 + l1 * y1 + l2 * y2;
  };
  d[0] = three(t[0], t[1], t[2], y[0], y[1], y[2], t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = three(t[i - 1], t[i], t[i + 1], y[i - 1], y[i], y[i + 1], t[i]);
  d[n - 1] = three(t[n - 3], t[n - 2], t[n - 1], y[n - 3], y[n - 2], y[n - 1], t[n - 1]);
  return d;
}

GrowthReport number_growth_inequality(std::span<const double> times, std::span<const double> number_plus_one,
                                      const SemiclassicalConstants& constants, double q0) {
  GrowthReport rep;
  rep.derivative = grid_derivative(times, number_plus_one);
  const double rate = 2.0 * std::max(2.0, q0);
  rep.ratio.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double bound = 16.0 * (constants.cx + constants.cp) * std::exp(rate * std::abs(times[i])) * number_plus_one[i];
    const double d = std::abs(rep.derivative[i]);
    rep.ratio[i] = bound > 0.0 ? d / bound : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (i > 0 && i + 1 < times.size()) {
      rep.max_interior_ratio = std::max(rep.max_interior_ratio, rep.ratio[i]);
      if (!(rep.ratio[i] <= 1.0)) rep.ok = false;
    }
  }
  return rep;
}

double theorem_log_bound(int particles, const SemiclassicalConstants& constants, double q0, double t) {
  const double q = std::max(2.0, q0);
  return 0.5 * std::log(static_cast<double>(particles)) + std::log(6.0) +
         8.0 * (constants.cx + constants.cp) / q * std::exp(2.0 * q * std::abs(t));
}

std::vector<TheoremRow> theorem_check(std::span<const TheoremSample> samples, const SemiclassicalConstants& constants,
                                      double q0, double trend_slack) {
  std::vector<TheoremRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    TheoremRow r;
    r.particles = s.particles;
    r.t = s.t;
    r.lhs = s.lhs;
    r.log_rhs = theorem_log_bound(s.particles, constants, q0, s.t);
    r.rhs = std::exp(r.log_rhs);
    r.trivial = 2.0 * s.particles;
    r.informative = r.rhs <= r.trivial;
    r.holds = s.lhs <= r.rhs;
    rows.push_back(r);
  }
  // Trend: at fixed t, lhs/2N must not increase with N.
  std::map<double, std::vector<std::size_t>> by_time;
  for (std::size_t i = 0; i < rows.size(); ++i) by_time[rows[i].t].push_back(i);
  for (auto& [t, idx] : by_time) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rows[a].particles < rows[b].particles; });
    for (std::size_t j = 1; j < idx.size(); ++j) {
      const auto& prev = rows[idx[j - 1]];
      auto& cur = rows[idx[j]];
      cur.trend_ok = cur.lhs / cur.trivial <= prev.lhs / prev.trivial + trend_slack;
    }
  }
  return rows;
}

}  // namespace hfcheck
