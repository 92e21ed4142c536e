#include "hfcheck/hartreefock.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hfcheck {

HartreeFock::HartreeFock(ModeBasis basis, Potential potential)
    : basis_(std::move(basis)), potential_(std::move(potential)), kinetic_(kinetic(basis_)) {
  if (!potential_.empty() && potential_.dim() != basis_.dim()) {
    throw ValidationError("hartree-fock: potential dimension differs from basis dimension");
  }
}

OneBodyOperator HartreeFock::mean_field(const OneBodyOperator& omega) const {
  OneBodyOperator h = kinetic_;
  if (potential_.empty()) return h;
  const double inv_n = 1.0 / basis_.particles();
  h += inv_n * (direct_term(basis_, potential_, omega) - exchange_term(basis_, potential_, omega));
  return h;
}

Eigen::MatrixXcd HartreeFock::rhs(const Eigen::MatrixXcd& orbitals) const {
  const OneBodyOperator omega = orbitals * orbitals.adjoint();
  const cplx factor = 1.0 / cplx(0.0, basis_.hbar());
  return factor * (mean_field(omega) * orbitals);
}

double HartreeFock::energy(const OneBodyOperator& omega) const {
  double e = (kinetic_ * omega).trace().real();
  if (potential_.empty()) return e;
  double direct = 0.0;
  for (const auto& [p, v] : potential_.coefficients()) direct += v * std::norm(density_fourier(basis_, omega, p));
  const double exchange = (exchange_term(basis_, potential_, omega) * omega).trace().real();
  e += (direct - exchange) / (2.0 * basis_.particles());
  return e;
}

namespace {

Eigen::MatrixXcd rk4_step(const HartreeFock& model, const Eigen::MatrixXcd& y, double h) {
  const Eigen::MatrixXcd k1 = model.rhs(y);
  const Eigen::MatrixXcd k2 = model.rhs(y + 0.5 * h * k1);
  const Eigen::MatrixXcd k3 = model.rhs(y + 0.5 * h * k2);
  const Eigen::MatrixXcd k4 = model.rhs(y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Eigen::MatrixXcd reorthonormalize(const Eigen::MatrixXcd& orbitals) {
  const auto n = orbitals.cols();
  if (n == 0) return orbitals;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(orbitals);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(orbitals.rows(), n);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

Eigen::MatrixXcd propagate_fixed(const HartreeFock& model, const Eigen::MatrixXcd& orbitals, double interval,
                                 int steps) {
  if (steps < 1) throw ValidationError("propagate_fixed: need at least one step");
  const double h = interval / steps;
  Eigen::MatrixXcd y = orbitals;
  for (int s = 0; s < steps; ++s) y = rk4_step(model, y, h);
  return y;
}

HFTrajectory evolve_hf(const HartreeFock& model, const HFState& initial, std::span<const double> output_times,
                       const IntegratorOptions& options) {
  const double dt_max = options.dt_max_over_hbar * model.basis().hbar();
  if (!(dt_max > 0.0) || !(options.rtol > 0.0)) throw ValidationError("evolve_hf: invalid integrator options");

  HFTrajectory traj;
  traj.states.reserve(output_times.size());
  Eigen::MatrixXcd y = initial.orbitals;
  double t = initial.t;
  double h = dt_max;

  for (double t_out : output_times) {
    if (t_out < t - 1e-15) throw ValidationError("evolve_hf: output times must be ascending and >= t0");
    while (t_out - t > 1e-14 * std::max(1.0, std::abs(t_out))) {
      const double step = std::min(h, t_out - t);
      const Eigen::MatrixXcd coarse = rk4_step(model, y, step);
      const Eigen::MatrixXcd fine = rk4_step(model, rk4_step(model, y, 0.5 * step), 0.5 * step);
      const double err = (fine - coarse).cwiseAbs().maxCoeff() / 15.0;
      const double scale = options.rtol * std::max(1.0, fine.cwiseAbs().maxCoeff());
      const double factor = err > 0.0 ? 0.9 * std::pow(scale / err, 0.2) : 4.0;
      if (err <= scale) {
        y = reorthonormalize(fine + (fine - coarse) / 15.0);
        t += step;
        ++traj.stats.accepted;
        // A step clipped to hit an output time does not shrink the next one.
        h = std::min(dt_max, std::max(h, step) * std::min(4.0, factor));
      } else {
        ++traj.stats.rejected;
        h = step * std::max(0.1, factor);
        if (h < options.dt_min) {
          std::ostringstream os;
          os << "evolve_hf: step size underflow at t = " << t << " (h = " << h << ", error estimate " << err
             << ")";
          throw IntegrationError(os.str());
        }
      }
    }
    t = t_out;
    traj.states.push_back({t_out, y});
  }
  return traj;
}

ProjectionDefects projection_defects(const OneBodyOperator& omega, int particles) {
  return {operator_norm(omega * omega - omega), std::abs(omega.trace().real() - particles)};
}

std::vector<Momentum> sampled_shifts(int dim, int alpha_max) {
  std::vector<Momentum> out;
  if (alpha_max < 1) return out;
  Momentum a(static_cast<std::size_t>(dim), -alpha_max);
  while (true) {
    if (std::any_of(a.begin(), a.end(), [](int c) { return c != 0; })) out.push_back(a);
    int i = dim - 1;
    for (; i >= 0; --i) {
      if (++a[static_cast<std::size_t>(i)] <= alpha_max) break;
      a[static_cast<std::size_t>(i)] = -alpha_max;
    }
    if (i < 0) break;
  }
  return out;
}

CommutatorDiagnostics commutator_diagnostics(const ModeBasis& basis, const OneBodyOperator& omega, int alpha_max,
                                             double t) {
  CommutatorDiagnostics diag;
  diag.t = t;
  double sum_sq = 0.0;
  for (int i = 0; i < basis.dim(); ++i) {
    const double c = trace_norm(commutator(momentum(basis, i), omega));
    sum_sq += c * c;
  }
  diag.trP = std::sqrt(sum_sq);

  for (const auto& alpha : sampled_shifts(basis.dim(), alpha_max)) {
    double a2 = 0.0;
    for (int c : alpha) a2 += static_cast<double>(c) * c;
    const OneBodyOperator shift = translation(basis, alpha);
    diag.trX = std::max(diag.trX, trace_norm(commutator(shift, omega)) / (1.0 + std::sqrt(a2)));

    double lost = 0.0;
    for (int m = 0; m < basis.size(); ++m) {
      if (!basis.shifted(m, alpha)) lost += omega(m, m).real();
    }
    diag.truncation_weight = std::max(diag.truncation_weight, lost);
  }
  diag.contaminated = diag.truncation_weight > 1e-8;
  return diag;
}

SemiclassicalConstants estimate_constants(std::span<const ConstantSample> family) {
  if (family.empty()) throw ValidationError("estimate_constants: empty family");
  SemiclassicalConstants c;
  for (const auto& s : family) {
    const double scale = s.particles * s.hbar;
    c.cx = std::max(c.cx, s.diagnostics.trX / scale);
    c.cp = std::max(c.cp, s.diagnostics.trP / scale);
  }
  return c;
}

double propagation_bound(int particles, double hbar, const SemiclassicalConstants& c, double q0, double t) {
  return particles * hbar * (c.cx + c.cp) * std::exp(2.0 * std::max(2.0, q0) * std::abs(t));
}

Scenario scenario_fermi_ball(int dim, double k_fermi, int cutoff, int alpha_max) {
  if (!(k_fermi >= 0.0)) throw ValidationError("fermi ball: k_F must be >= 0");
  if (static_cast<double>(cutoff) < k_fermi + alpha_max) {
    throw CapacityError("fermi ball: cutoff " + std::to_string(cutoff) + " < k_F + alpha_max");
  }
  // Count |B_F| on a throwaway basis, then build the scaled one.
  const ModeBasis probe(dim, cutoff, 1);
  std::vector<int> occupied;
  for (int m = 0; m < probe.size(); ++m) {
    if (probe.norm_sq(m) <= k_fermi * k_fermi + 1e-12) occupied.push_back(m);
  }
  ModeBasis basis(dim, cutoff, static_cast<int>(occupied.size()));
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(basis.size(), static_cast<Eigen::Index>(occupied.size()));
  std::vector<double> levels;
  const double h2 = basis.hbar() * basis.hbar();
  for (std::size_t j = 0; j < occupied.size(); ++j) {
    c(occupied[j], static_cast<Eigen::Index>(j)) = 1.0;
    levels.push_back(h2 * basis.norm_sq(occupied[j]));
  }
  return Scenario{basis, OrbitalSet(std::move(c)), std::move(levels), false};
}

Scenario scenario_trapped(const ModeBasis& basis, const Potential& trap) {
  if (!trap.empty() && trap.dim() != basis.dim()) throw ValidationError("trapped: trap dimension mismatch");
  const int m = basis.size();
  const int n = basis.particles();
  const OneBodyOperator h0 = kinetic(basis) + multiplication(basis, trap);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h0);
  const Eigen::VectorXd& evals = es.eigenvalues();
  const Eigen::MatrixXcd& evecs = es.eigenvectors();

  constexpr double kTie = 1e-10;
  Eigen::MatrixXcd vecs(m, m);
  int col = 0;
  for (int start = 0; start < m;) {
    int stop = start + 1;
    while (stop < m && evals(stop) - evals(stop - 1) < kTie) ++stop;
    const Eigen::MatrixXcd span = evecs.middleCols(start, stop - start);
    // Project unit modes onto the cluster in mode order, keep the
    // independent ones.
    int taken = 0;
    for (int k = 0; k < m && taken < stop - start; ++k) {
      ModeVector v = span * span.row(k).adjoint();
      for (int pass = 0; pass < 2; ++pass) {
        for (int j = col - taken; j < col; ++j) v -= vecs.col(j) * vecs.col(j).dot(v);
      }
      const double nv = v.norm();
      if (nv < 1e-6) continue;
      vecs.col(col++) = v / nv;
      ++taken;
    }
    start = stop;
  }

  // Phase: largest component (first in mode order on ties) real positive.
  for (int j = 0; j < m; ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (std::abs(vecs(k, j)) > best + 1e-12) {
        best = std::abs(vecs(k, j));
        arg = k;
      }
    }
    vecs.col(j) *= std::conj(vecs(arg, j)) / std::abs(vecs(arg, j));
  }

  std::vector<double> levels(evals.data(), evals.data() + m);
  const bool degenerate = n < m && evals(n) - evals(n - 1) < kTie;
  // Re-orthonormalize the selected columns to machine precision.
  return Scenario{basis, OrbitalSet(reorthonormalize(vecs.leftCols(n))), std::move(levels), degenerate};
}

}  // namespace hfcheck
