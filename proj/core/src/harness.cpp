#include "hfcheck/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#ifndef HFCHECK_VERSION
#define HFCHECK_VERSION "0.0.0"
#endif

namespace hfcheck {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Desk-scale caps for exact dynamics.
constexpr int kMaxExactModes = 16;
constexpr int kMaxExactParticles = 5;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double boundary_weight(const ModeBasis& basis, const OneBodyOperator& omega, int reach) {
  double w = 0.0;
  for (int m = 0; m < basis.size(); ++m) {
    if (basis.boundary_distance(m) < reach) w += omega(m, m).real();
  }
  return w;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

// NaN and inf are not JSON numbers; store them as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

const char* version() noexcept { return HFCHECK_VERSION; }

const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{
      "t",           "trace_distance", "tracenormdiff_rhs", "number_expectation", "trX",
      "trP",         "propagation_bound", "gronwall_ratio",  "hf_energy",          "exact_energy",
      "projection_defect", "truncation_flags", "number_derivative_fd", "number_derivative_direct",
      "trace_defect"};
  return cols;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  const auto& cols = trajectory_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.t << ',' << r.trace_distance << ',' << r.tracenormdiff_rhs << ',' << r.number_expectation << ','
       << r.trX << ',' << r.trP << ',' << r.propagation_bound << ',' << r.gronwall_ratio << ',' << r.hf_energy
       << ',' << r.exact_energy << ',' << r.projection_defect << ',' << r.truncation_flags << ','
       << r.number_derivative_fd << ',' << r.number_derivative_direct << ',' << r.trace_defect << '\n';
  }
}

PreparedScenario prepare_scenario(const ScenarioConfig& config) {
  Potential v(config.dim, config.potential);
  const int amax = config.effective_alpha_max();

  std::optional<Scenario> sc;
  if (config.kind == ScenarioKind::trapped) {
    sc.emplace(scenario_trapped(ModeBasis(config.dim, config.cutoff, config.particles),
                                Potential(config.dim, config.trap)));
  } else {
    sc.emplace(scenario_fermi_ball(config.dim, config.k_fermi, config.cutoff, amax));
  }
  const ModeBasis& basis = sc->basis;
  if (config.exact) {
    if (basis.size() > kMaxExactModes) {
      throw CapacityError("exact dynamics: " + std::to_string(basis.size()) + " modes exceeds cap " +
                          std::to_string(kMaxExactModes) + " (reduce K or set exact = false)");
    }
    if (basis.particles() > kMaxExactParticles) {
      throw CapacityError("exact dynamics: N = " + std::to_string(basis.particles()) + " exceeds cap " +
                          std::to_string(kMaxExactParticles));
    }
  }

  if (config.random_phases) {
    std::mt19937_64 rng(config.seed);
    Eigen::MatrixXcd c = sc->orbitals.coefficients();
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      c.col(j) *= std::polar(1.0, 2.0 * std::numbers::pi * u);
    }
    sc.emplace(Scenario{sc->basis, OrbitalSet(std::move(c)), sc->levels, sc->degenerate});
  }

  CommutatorDiagnostics initial = commutator_diagnostics(basis, sc->orbitals.density(), amax, 0.0);
  return PreparedScenario{std::move(*sc), std::move(v), initial};
}

RunResult run_scenario(const ScenarioConfig& config, std::optional<SemiclassicalConstants> constants) {
  const auto start = std::chrono::steady_clock::now();
  PreparedScenario prep = prepare_scenario(config);
  const ModeBasis& basis = prep.scenario.basis;
  const Potential& v = prep.potential;
  const int n = basis.particles();
  const int amax = config.effective_alpha_max();

  RunResult res;
  res.config = config;
  RunSummary& sum = res.summary;
  sum.particles = n;
  sum.modes = basis.size();
  sum.hbar = basis.hbar();
  sum.q0 = v.q0();
  sum.degenerate = prep.scenario.degenerate;
  sum.constants_from_family = constants.has_value();
  if (constants) {
    sum.constants = *constants;
  } else {
    const ConstantSample self{n, basis.hbar(), prep.initial};
    sum.constants = estimate_constants(std::span<const ConstantSample>(&self, 1));
  }

  const HartreeFock model(basis, v);
  const std::vector<double> times = config.output_times();
  HFTrajectory traj;
  try {
    traj = evolve_hf(model, HFState{0.0, prep.scenario.orbitals.coefficients()}, times, config.integrator);
  } catch (const IntegrationError& e) {
    throw IntegrationError(std::string("N = ") + std::to_string(n) + ": " + e.what());
  }
  sum.integrator = traj.stats;

  std::optional<ManyBodyHamiltonian> h;
  std::optional<ExactPropagator> prop;
  FockVector psi0;
  if (config.exact) {
    h.emplace(build_hamiltonian(basis, v, kMaxExactModes));
    prop.emplace(*h, std::vector<int>{n});
    psi0 = slater(h->fock, prep.scenario.orbitals);
    sum.eigen_residual = prop->eigen_residual();
  }

  const double e0 = model.energy(prep.scenario.orbitals.density());
  std::vector<double> number_plus_one;
  res.rows.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    const OrbitalSet orbitals(traj.states[i].orbitals);
    const OneBodyOperator omega = orbitals.density();
    TrajectoryRow row;
    row.t = t;
    const ProjectionDefects pd = projection_defects(omega, n);
    row.projection_defect = pd.idempotency;
    row.trace_defect = pd.trace;
    row.hf_energy = model.energy(omega);
    sum.max_energy_drift = std::max(sum.max_energy_drift, std::abs(row.hf_energy - e0));

    const CommutatorDiagnostics diag = commutator_diagnostics(basis, omega, amax, t);
    row.trX = diag.trX;
    row.trP = diag.trP;
    row.propagation_bound = propagation_bound(n, basis.hbar(), sum.constants, sum.q0, t);
    if (diag.contaminated) row.truncation_flags |= kTranslationContamination;
    if (!v.empty() && boundary_weight(basis, omega, v.support_radius()) > 1e-8) {
      row.truncation_flags |= kInteractionBoundary;
    }
    if (prep.scenario.degenerate) row.truncation_flags |= kDegenerateFermiLevel;

    if (prop) {
      const FockVector psi = prop->evolve(psi0, t);
      const FluctuationSnapshot snap = fluctuation_state(h->fock, orbitals, psi, t);
      const TraceDistance td = trace_distance_check(h->fock, psi, omega, n, snap.number_plus_one);
      row.trace_distance = td.lhs;
      row.tracenormdiff_rhs = td.rhs;
      row.number_expectation = snap.number_plus_one;
      row.exact_energy = prop->energy(psi);
      const FluctuationTerms terms(basis, v, orbitals);
      row.number_derivative_direct = number_derivative_direct(terms, snap.xi, basis.hbar());
      sum.max_norm_defect = std::max(sum.max_norm_defect, std::abs(snap.norm - 1.0));
      number_plus_one.push_back(snap.number_plus_one);
    } else {
      row.trace_distance = row.tracenormdiff_rhs = row.number_expectation = row.exact_energy = kNaN;
      row.number_derivative_direct = row.number_derivative_fd = row.gronwall_ratio = kNaN;
    }
    sum.flags |= row.truncation_flags;
    res.rows.push_back(row);
  }

  if (prop) {
    const GrowthReport growth = number_growth_inequality(times, number_plus_one, sum.constants, sum.q0);
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      auto& row = res.rows[i];
      row.number_derivative_fd = growth.derivative[i];
      row.gronwall_ratio = growth.ratio[i];
      sum.max_gronwall_ratio = std::max(sum.max_gronwall_ratio, row.gronwall_ratio);
      sum.max_derivative_mismatch =
          std::max(sum.max_derivative_mismatch, std::abs(row.number_derivative_fd - row.number_derivative_direct));
    }
  }

  for (const auto& r : res.rows) {
    bool ok = r.propagation_bound >= r.trX && r.propagation_bound >= r.trP;
    if (config.exact) ok = ok && r.tracenormdiff_rhs >= r.trace_distance && r.gronwall_ratio <= 1.0;
    sum.bounds_dominate = sum.bounds_dominate && ok;
  }
  sum.wall_seconds = seconds_since(start);
  return res;
}

std::string manifest_json(const RunResult& r) {
  const RunSummary& s = r.summary;
  json j{{"version", version()},
         {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                               std::to_string(EIGEN_MINOR_VERSION)},
         {"config", json::parse(config_to_json(r.config))},
         {"N", s.particles},
         {"M", s.modes},
         {"hbar", s.hbar},
         {"q0", s.q0},
         {"C_X", s.constants.cx},
         {"C_P", s.constants.cp},
         {"constants_source", s.constants_from_family ? "family" : "single run"},
         {"integrator", {{"accepted", s.integrator.accepted}, {"rejected", s.integrator.rejected}}},
         {"rows", r.rows.size()},
         {"columns", trajectory_columns()},
         {"max_norm_defect", number(s.max_norm_defect)},
         {"eigen_residual", number(s.eigen_residual)},
         {"max_derivative_mismatch", number(s.max_derivative_mismatch)},
         {"max_hf_energy_drift", number(s.max_energy_drift)},
         {"max_gronwall_ratio", number(s.max_gronwall_ratio)},
         {"truncation_flags", s.flags},
         {"degenerate_fermi_level", s.degenerate},
         {"bounds_dominate", s.bounds_dominate},
         {"wall_seconds", s.wall_seconds}};
  return j.dump(2) + "\n";
}

void write_run(const std::filesystem::path& dir, const RunResult& result) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, result.rows);
  write_text(dir / "trajectory.csv", csv.str());
  write_text(dir / "manifest.json", manifest_json(result));
}

int thread_count() {
  if (const char* env = std::getenv("HFCHECK_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_theorem_csv(std::ostream& os, const std::vector<TheoremRow>& rows) {
  os << "N,t,lhs,rhs,log_rhs,trivial_bound,informative,holds,trend_ok\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.particles << ',' << r.t << ',' << r.lhs << ',' << r.rhs << ',' << r.log_rhs << ',' << r.trivial << ','
       << int(r.informative) << ',' << int(r.holds) << ',' << int(r.trend_ok) << '\n';
  }
}

FamilyResult run_family(const ScenarioConfig& base, const std::vector<int>& particle_numbers,
                        const std::filesystem::path& out, int threads) {
  const auto start = std::chrono::steady_clock::now();
  if (base.kind != ScenarioKind::trapped) {
    throw ConfigError("scenario.kind", "a family needs an N-parametrized scenario (trapped)");
  }
  const std::set<int> distinct(particle_numbers.begin(), particle_numbers.end());
  if (distinct.size() < 2) throw ConfigError("n", "a family needs at least two distinct values of N");
  if (*distinct.begin() < 1) throw ConfigError("n", "N must be >= 1");
  if (!base.exact) throw ConfigError("exact", "a family needs exact dynamics for the error table");
  const std::vector<int> ns(distinct.begin(), distinct.end());

  // A member whose initial data cannot be built counts as a failed member;
  // the constants come from the others.
  std::vector<ScenarioConfig> configs;
  std::vector<ConstantSample> samples;
  std::vector<std::string> errors(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    ScenarioConfig c = base;
    c.particles = ns[i];
    try {
      const PreparedScenario p = prepare_scenario(c);
      samples.push_back({ns[i], p.scenario.basis.hbar(), p.initial});
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
    configs.push_back(std::move(c));
  }
  if (samples.empty()) throw FamilyError("family: no member could be prepared; N = " + std::to_string(ns[0]) + ": " + errors[0]);

  FamilyResult fam;
  fam.constants = estimate_constants(samples);
  fam.q0 = Potential(base.dim, base.potential).q0();

  const int workers = std::clamp(threads > 0 ? threads : thread_count(), 1, static_cast<int>(ns.size()));
  std::vector<std::optional<RunResult>> results(ns.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < ns.size(); i = next++) {
      if (!errors[i].empty()) continue;
      try {
        RunResult r = run_scenario(configs[i], fam.constants);
        write_run(out / ("N" + std::to_string(ns[i])), r);
        results[i] = std::move(r);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::vector<TheoremSample> table_in;
  json failures = json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!results[i]) {
      failures.push_back({{"N", ns[i]}, {"error", errors[i]}});
      continue;
    }
    for (const auto& row : results[i]->rows) table_in.push_back({ns[i], row.t, row.trace_distance});
    fam.members.push_back(std::move(*results[i]));
  }
  fam.table = theorem_check(table_in, fam.constants, fam.q0);
  for (const auto& r : fam.table) {
    fam.all_hold = fam.all_hold && r.holds;
    fam.trend_ok = fam.trend_ok && r.trend_ok;
  }
  fam.wall_seconds = seconds_since(start);

  std::filesystem::create_directories(out);
  std::ostringstream csv;
  write_theorem_csv(csv, fam.table);
  write_text(out / "theorem_table.csv", csv.str());

  json members = json::array();
  for (const auto& m : fam.members) {
    members.push_back({{"N", m.summary.particles},
                       {"dir", "N" + std::to_string(m.summary.particles)},
                       {"hbar", m.summary.hbar},
                       {"bounds_dominate", m.summary.bounds_dominate},
                       {"max_gronwall_ratio", number(m.summary.max_gronwall_ratio)},
                       {"truncation_flags", m.summary.flags}});
  }
  double max_log_rhs = -std::numeric_limits<double>::infinity();
  bool informative = false;
  for (const auto& r : fam.table) {
    max_log_rhs = std::max(max_log_rhs, r.log_rhs);
    informative = informative || r.informative;
  }
  json manifest{{"version", version()},
                {"status", failures.empty() ? "ok" : "failed"},
                {"base_config", json::parse(config_to_json(base))},
                {"N", ns},
                {"q0", fam.q0},
                {"C_X", fam.constants.cx},
                {"C_P", fam.constants.cp},
                {"members", members},
                {"failures", failures},
                {"theorem",
                 {{"all_hold", fam.all_hold},
                  {"trend_ok", fam.trend_ok},
                  {"any_informative", informative},
                  {"max_log_rhs", number(max_log_rhs)}}},
                {"workers", workers},
                {"wall_seconds", fam.wall_seconds}};
  write_text(out / "family_manifest.json", manifest.dump(2) + "\n");

  if (!failures.empty()) {
    std::string msg = "family: " + std::to_string(failures.size()) + " member(s) failed";
    for (const auto& f : failures) msg += "; N = " + std::to_string(f["N"].get<int>()) + ": " + f["error"].get<std::string>();
    throw FamilyError(msg);
  }
  return fam;
}

}  // namespace hfcheck
