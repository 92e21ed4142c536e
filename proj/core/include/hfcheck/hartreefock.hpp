#pragma once

/**
 * Time-dependent Hartree-Fock dynamics of N orbitals on the torus,
 * initial-data scenarios, and semiclassical commutator diagnostics.
 *
 * Orbitals evolve by
 *
 *     iħ ∂_t φ_j = h(ω) φ_j,   h(ω) = -ħ²Δ + (1/N) (D(ω) - X(ω)),
 *
 * with D the direct and X the exchange term. No unitary mixing of the
 * orbitals is applied, which fixes their phases along a trajectory.
 */

#include <span>
#include <vector>

#include "hfcheck/fockspace.hpp"
#include "hfcheck/onebody.hpp"

namespace hfcheck {

struct HFState {
  double t = 0.0;
  Eigen::MatrixXcd orbitals;  ///< M x N, columns are φ_j

  OneBodyOperator density() const { return orbitals * orbitals.adjoint(); }
};

/// Mean-field model: mode basis, interaction, cached kinetic operator.
class HartreeFock {
 public:
  HartreeFock(ModeBasis basis, Potential potential);

  const ModeBasis& basis() const noexcept { return basis_; }
  const Potential& potential() const noexcept { return potential_; }
  const OneBodyOperator& kinetic_operator() const noexcept { return kinetic_; }

  /// h(ω) = -ħ²Δ + (1/N)(D(ω) - X(ω))
  OneBodyOperator mean_field(const OneBodyOperator& omega) const;
  /// ∂_t φ_j = (iħ)^{-1} h(ω) φ_j for all columns.
  Eigen::MatrixXcd rhs(const Eigen::MatrixXcd& orbitals) const;
  /// E(ω) = tr(-ħ²Δ ω) + (1/2N) [Σ_p v_p |ρ̂(p)|² - tr(X(ω) ω)]
  double energy(const OneBodyOperator& omega) const;

 private:
  ModeBasis basis_;
  Potential potential_;
  OneBodyOperator kinetic_;
};

struct IntegratorOptions {
  double rtol = 1e-9;
  /// Upper step bound in units of ħ.
  double dt_max_over_hbar = 0.01;
  double dt_min = 1e-13;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
};

struct HFTrajectory {
  std::vector<HFState> states;  ///< one per requested output time
  IntegratorStats stats;
};

/**
 * Adaptive RK4 (step doubling) from `initial` through the ascending
 * `output_times` (>= initial.t). Orbitals are re-orthonormalized by QR
 * after every accepted step. Throws IntegrationError on step underflow.
 */
HFTrajectory evolve_hf(const HartreeFock& model, const HFState& initial, std::span<const double> output_times,
                       const IntegratorOptions& options = {});

/// Fixed-step classical RK4 over a signed interval, no re-orthonormalization.
Eigen::MatrixXcd propagate_fixed(const HartreeFock& model, const Eigen::MatrixXcd& orbitals, double interval,
                                 int steps);

/// QR re-orthonormalization with the phases of R's diagonal removed.
Eigen::MatrixXcd reorthonormalize(const Eigen::MatrixXcd& orbitals);

struct ProjectionDefects {
  double idempotency;  ///< ||ω² - ω||_op
  double trace;        ///< |tr ω - N|
};

ProjectionDefects projection_defects(const OneBodyOperator& omega, int particles);

struct CommutatorDiagnostics {
  double t = 0.0;
  double trP = 0.0;  ///< (Σ_i ||[P_i, ω]||_tr²)^{1/2}
  double trX = 0.0;  ///< max_α ||[e^{iα·X}, ω]||_tr / (1 + |α|)
  /// Largest orbital weight pushed past the cutoff by any sampled α.
  double truncation_weight = 0.0;
  bool contaminated = false;  ///< truncation_weight > 1e-8
};

CommutatorDiagnostics commutator_diagnostics(const ModeBasis& basis, const OneBodyOperator& omega, int alpha_max,
                                             double t = 0.0);

/// All integer α with 1 <= |α|_∞ <= alpha_max, lexicographic.
std::vector<Momentum> sampled_shifts(int dim, int alpha_max);

struct SemiclassicalConstants {
  double cx = 0.0;
  double cp = 0.0;
};

struct ConstantSample {
  int particles;
  double hbar;
  CommutatorDiagnostics diagnostics;
};

/// C_X = max trX/(Nħ), C_P = max trP/(Nħ) over the family. Throws on an empty family.
SemiclassicalConstants estimate_constants(std::span<const ConstantSample> family);

/// N ħ (C_X + C_P) e^{2 max(2, q0) |t|}
double propagation_bound(int particles, double hbar, const SemiclassicalConstants& c, double q0, double t);

struct Scenario {
  ModeBasis basis;
  OrbitalSet orbitals;
  std::vector<double> levels;  ///< one-body eigenvalues (trapped) or ħ²|k|² (Fermi ball)
  bool degenerate = false;     ///< Fermi level degenerate within 1e-10
};

/// Plane waves with |k| <= k_F; N = |B_F|. Requires cutoff >= k_F + alpha_max.
Scenario scenario_fermi_ball(int dim, double k_fermi, int cutoff, int alpha_max = 0);

/// N lowest eigenvectors of -ħ²Δ + W; degenerate levels resolved in mode order.
Scenario scenario_trapped(const ModeBasis& basis, const Potential& trap);

}  // namespace hfcheck
