#pragma once

/**
 * Fermionic Fock space over M modes.
 *
 * Basis states are occupation bitstrings (bit m <-> mode m), ordered by
 * their integer value. The CAR sign convention is global:
 *
 *     a*_j |n> = (-1)^{#occupied modes below j} |n + e_j>,
 *
 * so |n> = a*_{m1} a*_{m2} ... a*_{mk} Ω with m1 < m2 < ... < mk.
 *
 * Operators are sparse matrices; hot paths (Slater determinants, the
 * particle-hole unitary, 1-pdm) act on vectors directly.
 */

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "hfcheck/onebody.hpp"

namespace hfcheck {

using FockState = std::uint32_t;
using FockVector = Eigen::VectorXcd;
using FockOperator = Eigen::SparseMatrix<cplx>;

class FockBasis {
 public:
  static constexpr int kMaxModes = 24;

  explicit FockBasis(int modes);

  int modes() const noexcept { return modes_; }
  std::size_t dim() const noexcept { return std::size_t{1} << modes_; }
  /// Basis states with exactly n particles, ascending.
  const std::vector<FockState>& sector(int n) const { return sectors_.at(static_cast<std::size_t>(n)); }
  /// Position of s inside its particle-number sector.
  std::size_t position_in_sector(FockState s) const { return position_[s]; }
  FockVector vacuum() const;

 private:
  int modes_;
  std::vector<std::vector<FockState>> sectors_;
  std::vector<std::size_t> position_;
};

inline int particle_number(FockState s) noexcept { return __builtin_popcount(s); }

/// (-1)^{#occupied modes of s below j}
inline double fermion_sign(FockState s, int j) noexcept {
  const FockState below = s & ((FockState{1} << j) - 1u);
  return (__builtin_popcount(below) & 1) ? -1.0 : 1.0;
}

/**
 * N orthonormal orbitals φ_j given by their mode coefficient vectors
 * (columns of an M x N matrix).
 */
class OrbitalSet {
 public:
  /// Throws ValidationError if the Gram matrix deviates from 1 by more than tol.
  explicit OrbitalSet(Eigen::MatrixXcd coefficients, double tol = 1e-10);

  int modes() const noexcept { return static_cast<int>(coeffs_.rows()); }
  int count() const noexcept { return static_cast<int>(coeffs_.cols()); }
  const Eigen::MatrixXcd& coefficients() const noexcept { return coeffs_; }
  ModeVector orbital(int j) const { return coeffs_.col(j); }

  /// ω = Σ_j |φ_j><φ_j|
  OneBodyOperator density() const { return coeffs_ * coeffs_.adjoint(); }
  /// P = 1 - ω
  OneBodyOperator particle_projector() const;
  /// Orthonormal completion φ_{N+1..M} by pivoted Gram-Schmidt of the mode basis.
  Eigen::MatrixXcd completion() const;

 private:
  Eigen::MatrixXcd coeffs_;
};

/// Q_N = Σ_j |φ_j><conj φ_j| in mode coordinates; conj maps e_k to e_{-k}.
OneBodyOperator hole_kernel(const ModeBasis& basis, const OrbitalSet& orbitals);

// ---------------------------------------------------------------------------
// Vector kernels
// ---------------------------------------------------------------------------

/// out += scale * a*(f) in
void add_create(const FockBasis& fb, const ModeVector& f, const FockVector& in, FockVector& out,
                cplx scale = 1.0);
/// out += scale * a(f) in   (antilinear in f)
void add_annihilate(const FockBasis& fb, const ModeVector& f, const FockVector& in, FockVector& out,
                    cplx scale = 1.0);
/// out += scale * a_j in
void add_annihilate_mode(const FockBasis& fb, int j, const FockVector& in, FockVector& out,
                         cplx scale = 1.0);

FockVector apply_create(const FockBasis& fb, const ModeVector& f, const FockVector& in);
FockVector apply_annihilate(const FockBasis& fb, const ModeVector& f, const FockVector& in);
FockVector apply_dgamma(const FockBasis& fb, const OneBodyOperator& a, const FockVector& in);
FockVector apply_number(const FockBasis& fb, const FockVector& in);

/// <ψ, N ψ>
double number_expectation(const FockBasis& fb, const FockVector& psi);

// ---------------------------------------------------------------------------
// Operators
// ---------------------------------------------------------------------------

FockOperator create(const FockBasis& fb, int j);
FockOperator annihilate(const FockBasis& fb, int j);
/// a*(f) = Σ_m f_m a*_m
FockOperator smear_create(const FockBasis& fb, const ModeVector& f);
/// a(f) = Σ_m conj(f_m) a_m
FockOperator smear_annihilate(const FockBasis& fb, const ModeVector& f);
FockOperator number_operator(const FockBasis& fb);
/// dΓ(A) = Σ_{m,n} A_{mn} a*_m a_n
FockOperator dgamma(const FockBasis& fb, const OneBodyOperator& a);
/// Σ_{m,n} A_{mn} a_m a_n
FockOperator pair_annihilate(const FockBasis& fb, const OneBodyOperator& a);
/// Σ_{m,n} A_{mn} a*_m a*_n
FockOperator pair_create(const FockBasis& fb, const OneBodyOperator& a);

// ---------------------------------------------------------------------------
// Slater determinants and the particle-hole transformation
// ---------------------------------------------------------------------------

/// a*(φ_1) ... a*(φ_N) Ω
FockVector slater(const FockBasis& fb, const OrbitalSet& orbitals);

/// R_N ψ with R_N = Π_{j=1}^N (a*(φ_j) + a(φ_j)), factors in ascending j.
FockVector apply_particle_hole(const FockBasis& fb, const OrbitalSet& orbitals, const FockVector& psi);
/// R_N^* ψ = (a*(φ_N)+a(φ_N)) ... (a*(φ_1)+a(φ_1)) ψ
FockVector apply_particle_hole_adjoint(const FockBasis& fb, const OrbitalSet& orbitals,
                                       const FockVector& psi);
/// R_N as a sparse matrix, one column per basis state.
FockOperator particle_hole(const FockBasis& fb, const OrbitalSet& orbitals);
/// R_N as a dense matrix (small M only).
Eigen::MatrixXcd particle_hole_dense(const FockBasis& fb, const OrbitalSet& orbitals);

struct ConjugationResiduals {
  double forward;   ///< max_j ||R a*(φ_j) R^* - expected||_op
  double backward;  ///< max_j ||R^* a*(φ_j) R - expected||_op
};

/// Mode conjugation rule over the orbitals and a deterministic completion:
/// R a*(φ_j) R^* = (-1)^{N+1} a(φ_j) for j <= N, (-1)^N a*(φ_j) for j > N.
ConjugationResiduals conjugation_rule_check(const FockBasis& fb, const OrbitalSet& orbitals);

/// max_m || R^* a_m R - (-1)^N (a(P e_m) - a*(Q e_{-m})) ||_op
double ph_field_conjugation_check(const FockBasis& fb, const ModeBasis& basis, const OrbitalSet& orbitals);

/// γ_{m,n} = <ψ, a*_n a_m ψ>
OneBodyOperator one_pdm(const FockBasis& fb, const FockVector& psi);

/// Row-major dense dump, one row per line, entries as "re,im" separated by spaces.
void write_dense(std::ostream& os, const Eigen::MatrixXcd& a);

}  // namespace hfcheck
