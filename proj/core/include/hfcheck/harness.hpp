#pragma once

// Experiment orchestration: one scenario run produces a trajectory table
// (CSV, fixed column order, 17 significant digits) plus a JSON manifest; a
// family run repeats the scenario over several N concurrently and adds the
// error-bound table.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hfcheck/config.hpp"
#include "hfcheck/fluctuation.hpp"

namespace hfcheck {

const char* version() noexcept;

enum TruncationFlag : unsigned {
  kTranslationContamination = 1u,  ///< orbital weight within alpha_max of the cutoff
  kInteractionBoundary = 2u,       ///< orbital weight within the potential's reach of the cutoff
  kDegenerateFermiLevel = 4u,
};

struct TrajectoryRow {
  double t = 0.0;
  double trace_distance = 0.0;
  double tracenormdiff_rhs = 0.0;
  double number_expectation = 0.0;  ///< <ξ, (N+1) ξ>
  double trX = 0.0;
  double trP = 0.0;
  double propagation_bound = 0.0;
  double gronwall_ratio = 0.0;
  double hf_energy = 0.0;
  double exact_energy = 0.0;
  double projection_defect = 0.0;  ///< ||ω² - ω||_op
  unsigned truncation_flags = 0;
  double number_derivative_fd = 0.0;
  double number_derivative_direct = 0.0;
  double trace_defect = 0.0;  ///< |tr ω - N|
};

/// Column names in CSV order.
const std::vector<std::string>& trajectory_columns();
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows);

struct RunSummary {
  int particles = 0;
  int modes = 0;
  double hbar = 0.0;
  double q0 = 0.0;
  SemiclassicalConstants constants;
  bool constants_from_family = false;
  IntegratorStats integrator;
  double wall_seconds = 0.0;
  double max_norm_defect = 0.0;        ///< max_t | ||ξ_t|| - 1 |
  double eigen_residual = 0.0;
  double max_derivative_mismatch = 0.0;
  double max_energy_drift = 0.0;       ///< HF energy
  double max_gronwall_ratio = 0.0;
  unsigned flags = 0;                  ///< union over rows
  bool degenerate = false;
  bool bounds_dominate = true;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<TrajectoryRow> rows;
  RunSummary summary;
};

/// Initial data only: basis, orbitals, interaction and the t = 0 diagnostics.
struct PreparedScenario {
  Scenario scenario;
  Potential potential;
  CommutatorDiagnostics initial;
};

PreparedScenario prepare_scenario(const ScenarioConfig& config);

/// Constants default to the single-run estimate from the initial data.
RunResult run_scenario(const ScenarioConfig& config, std::optional<SemiclassicalConstants> constants = {});

std::string manifest_json(const RunResult& result);
void write_run(const std::filesystem::path& dir, const RunResult& result);

struct FamilyResult {
  std::vector<RunResult> members;
  SemiclassicalConstants constants;
  double q0 = 0.0;
  std::vector<TheoremRow> table;
  double wall_seconds = 0.0;
  bool all_hold = true;
  bool trend_ok = true;
};

class FamilyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Worker count for family runs: HFCHECK_THREADS if set and positive, else
/// the hardware concurrency.
int thread_count();

/// Requires at least two distinct N and an N-parametrized scenario. Members
/// that finish are written under out/N<n> even when others fail, in which
/// case FamilyError is thrown after the family manifest records the failures.
FamilyResult run_family(const ScenarioConfig& base, const std::vector<int>& particle_numbers,
                        const std::filesystem::path& out, int threads = 0);

void write_theorem_csv(std::ostream& os, const std::vector<TheoremRow>& rows);

}  // namespace hfcheck
