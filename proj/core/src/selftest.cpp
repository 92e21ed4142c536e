#include "hfcheck/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>

#include "hfcheck/fluctuation.hpp"
#include "hfcheck/harness.hpp"
#include "json.hpp"

namespace hfcheck {

namespace {

using Rng = std::mt19937_64;

ModeVector random_vector(Rng& rng, int n) {
  std::normal_distribution<double> g;
  ModeVector v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

Eigen::MatrixXcd random_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = cplx(g(rng), g(rng));
  }
  return a;
}

OrbitalSet random_orbitals(Rng& rng, int m, int n) { return OrbitalSet(reorthonormalize(random_matrix(rng, m, n))); }

double car_residual(int m) {
  const FockBasis fb(m);
  const auto dim = static_cast<Eigen::Index>(fb.dim());
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(dim, dim);
  std::vector<Eigen::MatrixXcd> a, ad;
  for (int j = 0; j < m; ++j) {
    a.emplace_back(annihilate(fb, j));
    ad.emplace_back(create(fb, j));
  }
  double worst = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      worst = std::max(worst, (a[i] * a[j] + a[j] * a[i]).cwiseAbs().maxCoeff());
      worst = std::max(worst, (ad[i] * ad[j] + ad[j] * ad[i]).cwiseAbs().maxCoeff());
      const Eigen::MatrixXcd expect = i == j ? id : Eigen::MatrixXcd::Zero(dim, dim);
      worst = std::max(worst, (a[i] * ad[j] + ad[j] * a[i] - expect).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// Largest relative excess max(0, lhs - rhs)/max(1, rhs) over the
// second-quantization bounds on random draws.
double second_quantization_excess(Rng& rng, int m, int draws) {
  const FockBasis fb(m);
  const FockOperator number = number_operator(fb);
  double worst = 0.0;
  auto excess = [&](double lhs, double rhs) { worst = std::max(worst, (lhs - rhs) / std::max(1.0, rhs)); };
  for (int d = 0; d < draws; ++d) {
    const Eigen::MatrixXcd a = random_matrix(rng, m, m);
    const FockVector psi = random_vector(rng, static_cast<int>(fb.dim())).normalized();
    const OperatorNorms nrm = norms(a);
    const FockVector n_psi = number * psi;
    const double sqrt_n = std::sqrt(std::max(0.0, psi.dot(n_psi).real()));
    const double sqrt_n1 = std::sqrt(std::max(0.0, psi.dot(n_psi).real() + 1.0));
    const double dg = (dgamma(fb, a) * psi).norm();
    const double ann = (pair_annihilate(fb, a) * psi).norm();
    const double cre = (pair_create(fb, a) * psi).norm();
    excess(dg, nrm.op * n_psi.norm());
    excess(dg, nrm.hs * sqrt_n);
    excess(dg, nrm.trace);
    excess(ann, nrm.hs * sqrt_n);
    excess(cre, 2.0 * nrm.hs * sqrt_n1);
    excess(ann, 2.0 * nrm.trace);
    excess(cre, 2.0 * nrm.trace);
  }
  return std::max(0.0, worst);
}

double particle_hole_residual(Rng& rng, int m) {
  const FockBasis fb(m);
  double worst = 0.0;
  for (int n = 0; n <= m; ++n) {
    const OrbitalSet orb = random_orbitals(rng, m, n);
    const Eigen::MatrixXcd r = particle_hole_dense(fb, orb);
    const auto dim = r.rows();
    worst = std::max(worst, (r.adjoint() * r - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff());
    worst = std::max(worst, (r.col(0) - slater(fb, orb)).cwiseAbs().maxCoeff());
    const ConjugationResiduals c = conjugation_rule_check(fb, orb);
    worst = std::max({worst, c.forward, c.backward});
  }
  return worst;
}

double field_rule_residual(Rng& rng, int cutoff) {
  double worst = 0.0;
  const int m = 2 * cutoff + 1;
  const FockBasis fb(m);
  for (int n = 1; n <= m; ++n) {
    const ModeBasis basis(1, cutoff, n);
    worst = std::max(worst, ph_field_conjugation_check(fb, basis, random_orbitals(rng, m, n)));
  }
  return worst;
}

Potential sample_potential() { return Potential(1, {{{0}, 1.0}, {{1}, 0.375}}); }

double hamiltonian_residual(Rng& rng) {
  const ModeBasis basis(1, 2, 2);
  const Potential v = sample_potential();
  const ManyBodyHamiltonian h = build_hamiltonian(basis, v);
  const Eigen::MatrixXcd dense(h.matrix);
  double worst = (dense - dense.adjoint()).cwiseAbs().maxCoeff();
  worst = std::max(worst, sector_leakage(h.fock, h.matrix));
  // Quasi-free expectation equals the HF energy functional.
  const HartreeFock hf(basis, v);
  for (int d = 0; d < 5; ++d) {
    const OrbitalSet orb = random_orbitals(rng, basis.size(), basis.particles());
    const FockVector s = slater(h.fock, orb);
    worst = std::max(worst, std::abs(s.dot(h.matrix * s).real() - hf.energy(orb.density())));
  }
  return worst;
}

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.dim = 1;
  c.cutoff = 3;
  c.kind = ScenarioKind::trapped;
  c.particles = 2;
  c.trap = {{{1}, -0.5}};
  c.t_final = 0.5;
  c.output_dt = 0.05;
  c.alpha_max = 1;
  return c;
}

double free_case_residual() {
  const RunResult r = run_scenario(small_config());
  double worst = 0.0;
  for (const auto& row : r.rows) {
    worst = std::max({worst, row.trace_distance, std::abs(row.number_expectation - 1.0)});
  }
  return worst;
}

double stationarity_residual() {
  const Scenario sc = scenario_fermi_ball(1, 1.0, 3, 1);
  const HartreeFock hf(sc.basis, sample_potential());
  const std::vector<double> times{1.0};
  const HFTrajectory traj = evolve_hf(hf, HFState{0.0, sc.orbitals.coefficients()}, times);
  return trace_norm(traj.states.back().density() - sc.orbitals.density());
}

double generator_residual() {
  ScenarioConfig c = small_config();
  c.cutoff = 2;
  const PreparedScenario p = prepare_scenario(c);
  const Potential v = sample_potential();
  const HartreeFock hf(p.scenario.basis, v);
  const ManyBodyHamiltonian h = build_hamiltonian(p.scenario.basis, v);
  const double delta = 1e-5 * p.scenario.basis.hbar();
  const Eigen::MatrixXcd c0 = reorthonormalize(propagate_fixed(hf, p.scenario.orbitals.coefficients(), 0.1, 10));
  const OrbitalStencil st = orbital_stencil(hf, c0, delta);
  const FluctuationTerms terms(p.scenario.basis, v, st.center);
  return generator_block_decomposition(h.fock, generator(h, st, delta), terms).worst();
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return !checks.empty();
}

std::string SelftestReport::json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    arr.push_back({{"name", c.name},
                   {"residual", c.residual},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed},
                   {"seconds", c.seconds}});
  }
  nlohmann::json j{{"version", version()}, {"passed", passed()}, {"checks", arr}};
  return j.dump(2);
}

SelftestReport run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  SelftestReport rep;
  auto run = [&](std::string name, double tol, const std::function<double()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    SelftestCheck c{std::move(name), 0.0, tol, false, 0.0};
    try {
      c.residual = fn();
      c.passed = c.residual < tol;
    } catch (const std::exception&) {
      c.residual = std::numeric_limits<double>::infinity();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.checks.push_back(std::move(c));
  };

  run("car_m6", 1e-12, [] { return car_residual(6); });
  run("second_quantization_bounds_m6", 1e-12, [&] { return second_quantization_excess(rng, 6, 100); });
  run("particle_hole_m6", 1e-11, [&] { return particle_hole_residual(rng, 6); });
  run("field_rule_m7", 1e-11, [&] { return field_rule_residual(rng, 3); });
  run("hamiltonian_m5", 1e-12, [&] { return hamiltonian_residual(rng); });
  run("free_case_m7", 1e-9, [] { return free_case_residual(); });
  run("fermi_ball_stationary_m7", 1e-8, [] { return stationarity_residual(); });
  run("generator_blocks_m5", 1e-6, [] { return generator_residual(); });
  return rep;
}

}  // namespace hfcheck
