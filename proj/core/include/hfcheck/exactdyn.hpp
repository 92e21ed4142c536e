#pragma once

/**
 * Second-quantized many-body Hamiltonian on the truncated torus and
 * its exact propagator.
 *
 *   H = Σ_k ħ²|k|² a*_k a_k + (1/2N) Σ_{p∈S} v_p Σ_{k,k'} a*_{k+p} a*_{k'} a_{k'+p} a_k
 *
 * Terms with any momentum outside the cutoff cube are dropped, which is the
 * exact Fock representation of ∫∫ V(x-y) a*_x a*_y a_y a_x for fields
 * restricted to the cube.
 */

#include <map>
#include <vector>

#include "hfcheck/fockspace.hpp"
#include "hfcheck/onebody.hpp"

namespace hfcheck {

struct ManyBodyHamiltonian {
  FockBasis fock;
  FockOperator matrix;
  Potential potential;
  int particles;
  double hbar;
};

ManyBodyHamiltonian build_hamiltonian(const ModeBasis& basis, const Potential& potential, int max_modes = 16);

/// Dense restriction of a sector-preserving operator to the n-particle sector.
Eigen::MatrixXcd sector_block(const FockBasis& fb, const FockOperator& op, int n);

/// Largest |entry| of op connecting different particle-number sectors.
double sector_leakage(const FockBasis& fb, const FockOperator& op);

/**
 * e^{-iHt/ħ} via one dense Hermitian eigendecomposition per requested sector.
 * The decompositions are computed up front (concurrently) and reused for
 * every time.
 */
class ExactPropagator {
 public:
  ExactPropagator(const ManyBodyHamiltonian& h, const std::vector<int>& sectors);

  /// Throws ValidationError if psi0 has weight on a sector that was not decomposed.
  FockVector evolve(const FockVector& psi0, double t) const;
  /// <ψ, H ψ>
  double energy(const FockVector& psi) const;
  /// Max ||H U - U diag(E)|| over sectors.
  double eigen_residual() const;

 private:
  struct Sector {
    Eigen::VectorXd energies;
    Eigen::MatrixXcd vectors;
    Eigen::MatrixXcd block;
  };

  FockBasis fock_;
  double hbar_;
  std::map<int, Sector> sectors_;
};

}  // namespace hfcheck
