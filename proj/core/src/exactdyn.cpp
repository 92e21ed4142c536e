#include "hfcheck/exactdyn.hpp"

#include <cmath>
#include <future>

namespace hfcheck {

namespace {

constexpr FockState bit(int j) { return FockState{1} << j; }

}  // namespace

ManyBodyHamiltonian build_hamiltonian(const ModeBasis& basis, const Potential& potential, int max_modes) {
  const int m = basis.size();
  if (m > max_modes) {
    throw CapacityError("hamiltonian: " + std::to_string(m) + " modes exceeds cap " + std::to_string(max_modes));
  }
  if (!potential.empty() && potential.dim() != basis.dim()) {
    throw ValidationError("hamiltonian: potential dimension differs from basis dimension");
  }
  FockBasis fb(m);
  const double h2 = basis.hbar() * basis.hbar();
  const double pair = 1.0 / (2.0 * basis.particles());

  // shift[p][k] = index of k + p or -1
  std::vector<std::pair<double, std::vector<int>>> shifts;
  for (const auto& [p, v] : potential.coefficients()) {
    std::vector<int> idx(static_cast<std::size_t>(m), -1);
    for (int k = 0; k < m; ++k) {
      if (auto j = basis.shifted(k, p)) idx[static_cast<std::size_t>(k)] = *j;
    }
    shifts.emplace_back(v, std::move(idx));
  }

  std::vector<Eigen::Triplet<cplx>> t;
  for (FockState s = 0; s < fb.dim(); ++s) {
    double kin = 0.0;
    for (int k = 0; k < m; ++k) {
      if (s & bit(k)) kin += h2 * basis.norm_sq(k);
    }
    if (kin != 0.0) t.emplace_back(s, s, kin);

    for (const auto& [v, up] : shifts) {
      // a*_{k+p} a*_{k'} a_{k'+p} a_k, applied right to left
      for (int k = 0; k < m; ++k) {
        if (!(s & bit(k))) continue;
        const int kp = up[static_cast<std::size_t>(k)];
        if (kp < 0) continue;
        const FockState s1 = s ^ bit(k);
        const double sg1 = fermion_sign(s, k);
        for (int l = 0; l < m; ++l) {
          const int lp = up[static_cast<std::size_t>(l)];
          if (lp < 0 || !(s1 & bit(lp))) continue;
          const FockState s2 = s1 ^ bit(lp);
          const double sg2 = sg1 * fermion_sign(s1, lp);
          if (s2 & bit(l)) continue;
          const FockState s3 = s2 | bit(l);
          const double sg3 = sg2 * fermion_sign(s2, l);
          if (s3 & bit(kp)) continue;
          const FockState s4 = s3 | bit(kp);
          t.emplace_back(s4, s, pair * v * sg3 * fermion_sign(s3, kp));
        }
      }
    }
  }
  const auto dim = static_cast<Eigen::Index>(fb.dim());
  FockOperator h(dim, dim);
  h.setFromTriplets(t.begin(), t.end());
  h.prune(cplx(0.0));
  return ManyBodyHamiltonian{std::move(fb), std::move(h), potential, basis.particles(), basis.hbar()};
}

Eigen::MatrixXcd sector_block(const FockBasis& fb, const FockOperator& op, int n) {
  const auto& states = fb.sector(n);
  const auto size = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(size, size);
  for (Eigen::Index c = 0; c < size; ++c) {
    const auto col = static_cast<Eigen::Index>(states[static_cast<std::size_t>(c)]);
    for (FockOperator::InnerIterator it(op, col); it; ++it) {
      const auto row = static_cast<FockState>(it.row());
      if (particle_number(row) != n) continue;
      block(static_cast<Eigen::Index>(fb.position_in_sector(row)), c) = it.value();
    }
  }
  return block;
}

double sector_leakage(const FockBasis& fb, const FockOperator& op) {
  (void)fb;
  double worst = 0.0;
  for (Eigen::Index col = 0; col < op.outerSize(); ++col) {
    for (FockOperator::InnerIterator it(op, col); it; ++it) {
      if (particle_number(static_cast<FockState>(it.row())) != particle_number(static_cast<FockState>(col))) {
        worst = std::max(worst, std::abs(it.value()));
      }
    }
  }
  return worst;
}

ExactPropagator::ExactPropagator(const ManyBodyHamiltonian& h, const std::vector<int>& sectors)
    : fock_(h.fock), hbar_(h.hbar) {
  std::map<int, std::future<Sector>> jobs;
  for (int n : sectors) {
    if (n < 0 || n > fock_.modes()) throw ValidationError("propagator: sector out of range");
    if (jobs.count(n)) continue;
    jobs.emplace(n, std::async(std::launch::async, [&h, n] {
                   Sector s;
                   s.block = sector_block(h.fock, h.matrix, n);
                   Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(s.block);
                   s.energies = es.eigenvalues();
                   s.vectors = es.eigenvectors();
                   return s;
                 }));
  }
  for (auto& [n, job] : jobs) sectors_.emplace(n, job.get());
}

FockVector ExactPropagator::evolve(const FockVector& psi0, double t) const {
  FockVector out = FockVector::Zero(psi0.size());
  for (int n = 0; n <= fock_.modes(); ++n) {
    const auto& states = fock_.sector(n);
    Eigen::VectorXcd local(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) local(static_cast<Eigen::Index>(i)) = psi0(states[i]);
    if (local.squaredNorm() == 0.0) continue;
    auto it = sectors_.find(n);
    if (it == sectors_.end()) {
      throw ValidationError("propagator: state has weight in undecomposed sector " + std::to_string(n));
    }
    const Sector& s = it->second;
    Eigen::VectorXcd coeff = s.vectors.adjoint() * local;
    for (Eigen::Index i = 0; i < coeff.size(); ++i) {
      coeff(i) *= std::exp(cplx(0.0, -s.energies(i) * t / hbar_));
    }
    local = s.vectors * coeff;
    for (std::size_t i = 0; i < states.size(); ++i) out(states[i]) = local(static_cast<Eigen::Index>(i));
  }
  return out;
}

double ExactPropagator::energy(const FockVector& psi) const {
  double e = 0.0;
  for (const auto& [n, s] : sectors_) {
    const auto& states = fock_.sector(n);
    Eigen::VectorXcd local(static_cast<Eigen::Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) local(static_cast<Eigen::Index>(i)) = psi(states[i]);
    e += local.dot(s.block * local).real();
  }
  return e;
}

double ExactPropagator::eigen_residual() const {
  double worst = 0.0;
  for (const auto& [n, s] : sectors_) {
    const Eigen::MatrixXcd r = s.block * s.vectors - s.vectors * s.energies.asDiagonal();
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace hfcheck
