#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "hfcheck/hartreefock.hpp"

using namespace hfcheck;
using testutil::max_abs;

namespace {

const Potential kSmooth(1, {{{0}, 1.0}, {{1}, 0.375}});

std::vector<double> grid(double t_final, int n) {
  std::vector<double> t;
  for (int i = 0; i <= n; ++i) t.push_back(t_final * i / n);
  return t;
}

}  // namespace

TEST_SUITE("hartreefock") {
  TEST_CASE("free evolution of a plane wave") {
    const ModeBasis b(1, 3, 1);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(7, 1);
    const int k = b.index_of({2}).value();
    c(k, 0) = 1.0;
    const HartreeFock hf(b, Potential());
    const std::vector<double> times{0.7};
    const auto traj = evolve_hf(hf, HFState{0.0, c}, times);
    const double hbar = b.hbar();
    // e^{-i ħ |k|² t} e_k
    const cplx expected = std::exp(cplx(0.0, -hbar * 4.0 * 0.7));
    CHECK(std::abs(traj.states[0].orbitals(k, 0) - expected) < 1e-9);
  }

  TEST_CASE("single orbital: direct and exchange cancel") {
    testutil::Rng rng(41);
    const ModeBasis b(1, 3, 1);
    const OrbitalSet orb = testutil::random_orbitals(rng, 7, 1);
    const auto omega = orb.density();
    const auto d = direct_term(b, kSmooth, omega);
    const auto x = exchange_term(b, kSmooth, omega);
    CHECK(((d - x) * orb.coefficients()).norm() < 1e-13);
    const HartreeFock interacting(b, kSmooth);
    const HartreeFock free(b, Potential());
    CHECK(max_abs(interacting.rhs(orb.coefficients()) - free.rhs(orb.coefficients())) < 1e-13);
  }

  TEST_CASE("Fermi ball builder") {
    CHECK(scenario_fermi_ball(1, 2.0, 4).basis.particles() == 5);
    CHECK(scenario_fermi_ball(2, 1.0, 2).basis.particles() == 5);
    CHECK(scenario_fermi_ball(3, 1.0, 1).basis.particles() == 7);
    CHECK_THROWS_AS(scenario_fermi_ball(1, 2.0, 3, 2), CapacityError);
    for (int d = 1; d <= 3; ++d) {
      const Scenario sc = scenario_fermi_ball(d, 1.5, 2);
      const ModeBasis& b = sc.basis;
      double sum = 0.0;
      for (int m = 0; m < b.size(); ++m) {
        if (b.norm_sq(m) <= 2.25) sum += b.hbar() * b.hbar() * b.norm_sq(m);
      }
      CHECK((kinetic(b) * sc.orbitals.density()).trace().real() == sum);
      CHECK(std::abs(b.hbar() - std::pow(b.particles(), -1.0 / d)) <= 1e-14 * b.hbar());
    }
  }

  TEST_CASE("Fermi ball is stationary for even interactions") {
    const Scenario sc = scenario_fermi_ball(1, 2.0, 4, 1);
    CHECK(kSmooth.q0() <= 4.0);
    const HartreeFock hf(sc.basis, kSmooth);
    const auto traj = evolve_hf(hf, HFState{0.0, sc.orbitals.coefficients()}, grid(1.0, 4));
    for (const auto& s : traj.states) CHECK(trace_norm(s.density() - sc.orbitals.density()) < 1e-8);

    const Scenario sc2 = scenario_fermi_ball(2, 1.0, 2, 1);
    const HartreeFock hf2(sc2.basis, Potential(2, {{{0, 0}, 1.0}, {{1, 0}, 0.25}, {{0, 1}, 0.25}}));
    const auto traj2 = evolve_hf(hf2, HFState{0.0, sc2.orbitals.coefficients()}, grid(1.0, 2));
    CHECK(trace_norm(traj2.states.back().density() - sc2.orbitals.density()) < 1e-8);
  }

  TEST_CASE("trapped scenario") {
    // W = 0: lowest plane waves, ties broken in mode order.
    const ModeBasis b(1, 3, 2);
    const Scenario free = scenario_trapped(b, Potential());
    const auto omega0 = free.orbitals.density();
    CHECK(omega0(b.index_of({0}).value(), b.index_of({0}).value()).real() == doctest::Approx(1.0));
    CHECK(omega0(b.index_of({-1}).value(), b.index_of({-1}).value()).real() == doctest::Approx(1.0));
    CHECK(free.degenerate);

    // W = 2 cos x: two lowest Mathieu-type eigenvectors.
    const ModeBasis b2(1, 4, 2);
    const Potential w(1, {{{1}, 1.0}});
    const Scenario sc = scenario_trapped(b2, w);
    const auto omega = sc.orbitals.density();
    CHECK(max_abs(omega * omega - omega) < 1e-10);
    CHECK_FALSE(sc.degenerate);
    for (std::size_t i = 1; i < sc.levels.size(); ++i) CHECK(sc.levels[i] >= sc.levels[i - 1]);
    const Eigen::MatrixXcd h0 = kinetic(b2) + multiplication(b2, w);
    const Eigen::MatrixXcd c = sc.orbitals.coefficients();
    for (int j = 0; j < 2; ++j) CHECK((h0 * c.col(j) - sc.levels[j] * c.col(j)).norm() < 1e-10);
  }

  TEST_CASE("trajectory invariants: projection, energy, step refinement") {
    const ModeBasis b(1, 4, 3);
    const Scenario sc = scenario_trapped(b, Potential(1, {{{1}, -0.5}}));
    const HartreeFock hf(b, kSmooth);
    IntegratorOptions opt;
    const auto times = grid(0.5, 10);
    const auto traj = evolve_hf(hf, HFState{0.0, sc.orbitals.coefficients()}, times, opt);
    const double e0 = hf.energy(sc.orbitals.density());
    for (const auto& s : traj.states) {
      const auto pd = projection_defects(s.density(), 3);
      CHECK(pd.idempotency < 1e-8);
      CHECK(pd.trace < 1e-8);
      CHECK(std::abs(hf.energy(s.density()) - e0) < 1e-8);
    }
    // Dynamics is nontrivial.
    CHECK(trace_norm(traj.states.back().density() - sc.orbitals.density()) > 1e-3);

    IntegratorOptions half = opt;
    half.dt_max_over_hbar *= 0.5;
    const auto traj2 = evolve_hf(hf, HFState{0.0, sc.orbitals.coefficients()}, times, half);
    CHECK(trace_norm(traj.states.back().density() - traj2.states.back().density()) < 10 * opt.rtol);

    // Agrees with fixed-step RK4 at fine resolution.
    const Eigen::MatrixXcd fixed = propagate_fixed(hf, sc.orbitals.coefficients(), 0.5, 2000);
    CHECK(max_abs(fixed - traj.states.back().orbitals) < 1e-8);
  }

  TEST_CASE("gauge covariance") {
    const ModeBasis b(1, 3, 2);
    const Scenario sc = scenario_trapped(b, Potential(1, {{{1}, -0.5}}));
    Eigen::MatrixXcd c = sc.orbitals.coefficients();
    c.col(0) *= std::polar(1.0, 0.7);
    c.col(1) *= std::polar(1.0, -2.1);
    const HartreeFock hf(b, kSmooth);
    const std::vector<double> times{0.4};
    const auto a = evolve_hf(hf, HFState{0.0, sc.orbitals.coefficients()}, times);
    const auto g = evolve_hf(hf, HFState{0.0, c}, times);
    CHECK(max_abs(a.states[0].density() - g.states[0].density()) < 1e-10);
    const auto da = commutator_diagnostics(b, a.states[0].density(), 1);
    const auto dg = commutator_diagnostics(b, g.states[0].density(), 1);
    CHECK(std::abs(da.trX - dg.trX) < 1e-10);
    CHECK(std::abs(da.trP - dg.trP) < 1e-10);
    CHECK(std::abs(hf.energy(a.states[0].density()) - hf.energy(g.states[0].density())) < 1e-10);
  }

  TEST_CASE("integrator rejects bad input") {
    const ModeBasis b(1, 2, 1);
    const HartreeFock hf(b, Potential());
    const Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(5, 1);
    const std::vector<double> backwards{0.2, 0.1};
    CHECK_THROWS_AS(evolve_hf(hf, HFState{0.0, c}, backwards), ValidationError);
    IntegratorOptions bad;
    bad.rtol = 0.0;
    const std::vector<double> one{0.1};
    CHECK_THROWS_AS(evolve_hf(hf, HFState{0.0, c}, one, bad), ValidationError);
    CHECK_THROWS_AS(HartreeFock(b, Potential(2, {{{1, 0}, 1.0}})), ValidationError);
  }

  TEST_CASE("commutator diagnostics") {
    // Fermi ball d = 1, k_F = 2: ||[e^{iX}, ω]||_tr = 2 and trP = 0.
    const Scenario sc = scenario_fermi_ball(1, 2.0, 4, 1);
    const auto omega = sc.orbitals.density();
    const auto d = commutator_diagnostics(sc.basis, omega, 1);
    CHECK(d.trP < 1e-12);
    CHECK(d.trX == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(oracle::trace_norm(commutator(translation(sc.basis, {1}), omega)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(d.contaminated);
    CHECK(sampled_shifts(2, 1).size() == 8);
    CHECK(sampled_shifts(1, 0).empty());
  }

  TEST_CASE("semiclassical constants") {
    CHECK_THROWS_AS(estimate_constants({}), ValidationError);
    std::vector<ConstantSample> fam;
    for (double kf : {1.0, 2.0, 3.0}) {
      const Scenario sc = scenario_fermi_ball(1, kf, static_cast<int>(kf) + 1, 1);
      fam.push_back({sc.basis.particles(), sc.basis.hbar(),
                     commutator_diagnostics(sc.basis, sc.orbitals.density(), 1)});
    }
    const auto c = estimate_constants(fam);
    CHECK(c.cp == 0.0);
    // trX = 1 for every Fermi ball in d = 1 and Nħ = 1.
    CHECK(c.cx == doctest::Approx(1.0));
    const auto single = estimate_constants(std::span<const ConstantSample>(fam.data(), 1));
    CHECK(single.cx == doctest::Approx(fam[0].diagnostics.trX / (fam[0].particles * fam[0].hbar)));
    CHECK(propagation_bound(3, 1.0 / 3, {1.0, 0.5}, 1.0, 0.0) == doctest::Approx(1.5));
    CHECK(propagation_bound(3, 1.0 / 3, {1.0, 0.5}, 5.0, 0.1) == doctest::Approx(1.5 * std::exp(1.0)));
  }

  TEST_CASE("trapped family constants stay bounded as N grows") {
    std::vector<double> cx, cp;
    for (int n : {4, 8, 16}) {
      const ModeBasis b(1, 12, n);
      const Scenario sc = scenario_trapped(b, Potential(1, {{{1}, -0.5}}));
      const auto d = commutator_diagnostics(b, sc.orbitals.density(), 1);
      cx.push_back(d.trX / (n * b.hbar()));
      cp.push_back(d.trP / (n * b.hbar()));
    }
    for (std::size_t i = 0; i < cx.size(); ++i) {
      CHECK(cx[i] < 2.0);
      CHECK(cp[i] < 2.0);
    }
  }
}
