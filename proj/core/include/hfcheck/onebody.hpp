#pragma once

/**
 * One-particle space on the torus [0, 2π)^d in a plane-wave basis.
 *
 * Modes are the integer momenta k with max_i |k_i| <= K, ordered
 * lexicographically. A one-body operator A is stored as its matrix
 * A_{k,k'} in mode coordinates, i.e. its kernel is
 *
 *     A(x; y) = Σ A_{k,k'} e_k(x) conj(e_{k'}(y)),   e_k(x) = (2π)^{-d/2} e^{ik·x}.
 *
 * Potentials follow V(x) = Σ_p v_p e^{ip·x}.
 */

#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hfcheck {

using cplx = std::complex<double>;
using Momentum = std::vector<int>;
using OneBodyOperator = Eigen::MatrixXcd;
using ModeVector = Eigen::VectorXcd;

/// Problem size exceeds what the discretization can hold.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a documented precondition.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time integration could not proceed (step-size underflow).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Plane-wave modes on the d-torus together with the scaling data.
 *
 * hbar is fixed to N^{-1/d} (mean-field / semiclassical scaling).
 */
class ModeBasis {
 public:
  ModeBasis(int dim, int cutoff, int particles);

  int dim() const noexcept { return dim_; }
  int cutoff() const noexcept { return cutoff_; }
  int size() const noexcept { return static_cast<int>(modes_.size()); }
  int particles() const noexcept { return particles_; }
  double hbar() const noexcept { return hbar_; }

  const std::vector<Momentum>& modes() const noexcept { return modes_; }
  const Momentum& mode(int m) const { return modes_.at(static_cast<std::size_t>(m)); }

  /// Index of momentum k, or nullopt when k lies outside the cutoff cube.
  std::optional<int> index_of(const Momentum& k) const;
  /// Index of k_m + q, or nullopt when shifted out of the cube.
  std::optional<int> shifted(int m, const Momentum& q) const;
  /// Index of -k_m (the cube is symmetric, so this always exists).
  int negated(int m) const { return negated_[static_cast<std::size_t>(m)]; }
  /// |k_m|^2
  double norm_sq(int m) const;
  /// Chebyshev distance of k_m to the outside of the cube: K - max_i |k_i|.
  int boundary_distance(int m) const;

 private:
  int dim_;
  int cutoff_;
  int particles_;
  double hbar_;
  std::vector<Momentum> modes_;
  std::vector<int> negated_;
};

/// Validating constructor; throws CapacityError if N exceeds (2K+1)^d.
ModeBasis build_basis(int dim, int cutoff, int particles);

/**
 * Real, even trigonometric polynomial V(x) = Σ_{p∈S} v_p e^{ip·x}.
 *
 * Symmetry v_p = v_{-p} is enforced at construction: a record given for p
 * only is mirrored to -p, conflicting values are rejected.
 */
class Potential {
 public:
  struct Term {
    Momentum p;
    double v;
  };

  Potential() = default;
  Potential(int dim, const std::vector<Term>& terms);

  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return coeffs_.empty(); }
  const std::map<Momentum, double>& coefficients() const noexcept { return coeffs_; }
  double coefficient(const Momentum& p) const;
  /// Σ_p (1 + |p|)^2 |v_p|
  double q0() const noexcept { return q0_; }
  /// max_{p∈S} max_i |p_i|
  int support_radius() const noexcept { return radius_; }

 private:
  int dim_ = 0;
  std::map<Momentum, double> coeffs_;
  double q0_ = 0.0;
  int radius_ = 0;
};

struct OperatorNorms {
  double op;
  double hs;
  double trace;
};

OneBodyOperator kinetic(const ModeBasis& basis);
/// Component `axis` (0-based) of P = -iħ∇.
OneBodyOperator momentum(const ModeBasis& basis, int axis);
/// e^{iα·X}: e_k -> e_{k+α}, with modes shifted past the cutoff dropped.
OneBodyOperator translation(const ModeBasis& basis, const Momentum& alpha);
/// Multiplication by a trigonometric polynomial: W_{k,k'} = w_{k-k'}.
OneBodyOperator multiplication(const ModeBasis& basis, const Potential& w);

/// ρ̂(q) = Σ_m ω_{m+q, m}
cplx density_fourier(const ModeBasis& basis, const OneBodyOperator& omega, const Momentum& q);
/// Direct term V∗ρ: D_{k,k'} = v_{k-k'} ρ̂(k - k').
OneBodyOperator direct_term(const ModeBasis& basis, const Potential& v, const OneBodyOperator& omega);
/// Exchange term X(x;x') = V(x-x') ω(x;x'): X_{k,k'} = Σ_p v_p ω_{k-p, k'-p}.
OneBodyOperator exchange_term(const ModeBasis& basis, const Potential& v, const OneBodyOperator& omega);

OperatorNorms norms(const OneBodyOperator& a);
double trace_norm(const Eigen::MatrixXcd& a);
double operator_norm(const Eigen::MatrixXcd& a);

/// [A, B] = AB - BA
inline Eigen::MatrixXcd commutator(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a * b - b * a;
}

std::string to_string(const Momentum& k);

}  // namespace hfcheck
