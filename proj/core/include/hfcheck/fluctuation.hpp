#pragma once

/**
 * Fluctuation dynamics around the Hartree-Fock trajectory.
 *
 * With R_t the particle-hole unitary of the HF orbitals at time t,
 *
 *     ξ_t = R_t^* e^{-iHt/ħ} R_0 Ω,
 *     L(t) = (iħ ∂_t R_t^*) R_t + R_t^* H R_t.
 *
 * L(t) is compared blockwise (by particle-number shift) against the
 * quartic terms
 *
 *   A = (1/2N) ∫∫ V(x-y) a*(P_x) a*(P_y) a*(Q_y) a*(Q_x)
 *   B = (1/N)  ∫∫ V(x-y) a*(P_x) a*(P_y) a*(Q_x) a(P_y)
 *   C = (1/N)  ∫∫ V(x-y) a*(P_x) a*(Q_x) a*(Q_y) a(Q_y)
 *
 * contracted in mode coordinates. With a*(P_x) = Σ_{k'} a*(P e_{k'}) conj(e_{k'}(x))
 * and the analogous Q expansion, the x and y integrals reduce to momentum
 * deltas; see docs/contractions.md.
 */

#include <span>
#include <vector>

#include "hfcheck/exactdyn.hpp"
#include "hfcheck/hartreefock.hpp"

namespace hfcheck {

struct FluctuationSnapshot {
  double t = 0.0;
  FockVector xi;                 ///< ξ_t
  double norm = 0.0;             ///< ||ξ_t||
  double number_plus_one = 0.0;  ///< <ξ_t, (N+1) ξ_t>
};

/// ξ_t = R_t^* ψ_t for an exactly evolved ψ_t.
FluctuationSnapshot fluctuation_state(const FockBasis& fb, const OrbitalSet& orbitals_t, const FockVector& psi_t,
                                      double t);

struct TraceDistance {
  double lhs;  ///< ||γ_ψ - ω||_tr
  double rhs;  ///< (2 + 4√N) <ξ, (N+1) ξ>
};

TraceDistance trace_distance_check(const FockBasis& fb, const FockVector& psi_t, const OneBodyOperator& omega_t,
                                   int particles, double number_plus_one);

/// Quartic particle-number-changing parts of the fluctuation generator.
class FluctuationTerms {
 public:
  FluctuationTerms(const ModeBasis& basis, const Potential& potential, const OrbitalSet& orbitals);

  FockVector apply_a(const FockVector& xi) const;
  FockVector apply_b(const FockVector& xi) const;
  FockVector apply_c(const FockVector& xi) const;
  /// (4A + 2B + 2C) ξ
  FockVector apply_growth(const FockVector& xi) const;

  /// Dense matrices of A and B + C (small M only).
  Eigen::MatrixXcd dense_a() const;
  Eigen::MatrixXcd dense_bc() const;

  const OneBodyOperator& p() const noexcept { return p_; }
  const OneBodyOperator& q() const noexcept { return q_; }

 private:
  template <class Fn>
  Eigen::MatrixXcd dense(Fn&& apply) const;

  ModeBasis basis_;
  Potential potential_;
  FockBasis fock_;
  OneBodyOperator p_;
  OneBodyOperator q_;
};

/// d/dt <ξ, (N+1) ξ> = (2/ħ) Im <ξ, (4A + 2B + 2C) ξ>
double number_derivative_direct(const FluctuationTerms& terms, const FockVector& xi, double hbar);

/// Orbitals at t ± δ from those at t, by fixed-step RK4 of the HF equation.
struct OrbitalStencil {
  OrbitalSet minus;
  OrbitalSet center;
  OrbitalSet plus;
};

OrbitalStencil orbital_stencil(const HartreeFock& model, const Eigen::MatrixXcd& orbitals_t, double delta,
                               int substeps = 4);

/// L(t) with ∂_t R_t^* by a central difference of half-width δ (dense, small M).
Eigen::MatrixXcd generator(const ManyBodyHamiltonian& h, const OrbitalStencil& stencil, double delta);

struct BlockReport {
  double a_residual = 0.0;        ///< ||L_{+4} - A||_F
  double bc_residual = 0.0;       ///< ||L_{+2} - (B + C)||_F
  double a_adj_residual = 0.0;    ///< ||L_{-4} - A^*||_F
  double bc_adj_residual = 0.0;   ///< ||L_{-2} - (B + C)^*||_F
  double stray = 0.0;             ///< ||L_s||_F for odd s or |s| > 4
  double hermiticity = 0.0;       ///< ||L - L^*||_F
  double m_commutator = 0.0;      ///< ||[M, N]||_F, M = number-conserving part
  double a_norm = 0.0;
  double bc_norm = 0.0;

  double worst() const;
};

/// Part of a dense Fock matrix that shifts particle number by exactly `shift`.
Eigen::MatrixXcd shift_block(const FockBasis& fb, const Eigen::MatrixXcd& op, int shift);

BlockReport generator_block_decomposition(const FockBasis& fb, const Eigen::MatrixXcd& generator,
                                          const FluctuationTerms& terms);

struct GrowthReport {
  std::vector<double> derivative;  ///< finite-difference d/dt <N+1>
  std::vector<double> ratio;       ///< |derivative| / (2^4 (C_X+C_P) e^{2 max(2,q0)|t|} <N+1>)
  double max_interior_ratio = 0.0;
  bool ok = true;  ///< all interior ratios <= 1
};

/// Second-order finite differences (one-sided at the endpoints) on a possibly non-uniform grid.
std::vector<double> grid_derivative(std::span<const double> t, std::span<const double> y);

GrowthReport number_growth_inequality(std::span<const double> times, std::span<const double> number_plus_one,
                                      const SemiclassicalConstants& constants, double q0);

/// √N · 6 · exp(2^3 (C_X+C_P)/max(2,q0) · e^{2 max(2,q0)|t|}), as a natural log.
double theorem_log_bound(int particles, const SemiclassicalConstants& constants, double q0, double t);

struct TheoremRow {
  int particles = 0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;  ///< may be +inf
  double log_rhs = 0.0;
  double trivial = 0.0;  ///< 2N
  bool informative = false;  ///< rhs <= 2N
  bool holds = false;        ///< lhs <= rhs
  bool trend_ok = true;      ///< lhs/2N <= value at the next smaller N (same t)
};

struct TheoremSample {
  int particles;
  double t;
  double lhs;
};

/// Tabulates the error bound per (N, t); trend_ok compares lhs/2N across N at equal t.
std::vector<TheoremRow> theorem_check(std::span<const TheoremSample> samples, const SemiclassicalConstants& constants,
                                      double q0, double trend_slack = 1e-12);

}  // namespace hfcheck
