#pragma once

// Scenario configuration: a JSON document (comments allowed) describing one
// run. Unknown keys are rejected; every error carries the JSON path of the
// offending field. The schema is documented in docs/config.md.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hfcheck/hartreefock.hpp"
#include "hfcheck/onebody.hpp"

namespace hfcheck {

class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& what)
      : ValidationError(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ScenarioKind { trapped, fermi_ball };

struct ScenarioConfig {
  int dim = 1;
  int cutoff = 0;
  ScenarioKind kind = ScenarioKind::trapped;
  int particles = 0;      ///< trapped only; fermi_ball derives N = |B_F|
  double k_fermi = 0.0;   ///< fermi_ball only
  std::vector<Potential::Term> trap;       ///< W, trapped only
  std::vector<Potential::Term> potential;  ///< V
  double t_final = 0.0;
  double output_dt = 0.0;
  IntegratorOptions integrator;
  int alpha_max = -1;  ///< -1 selects the default 2K
  double fd_delta_over_hbar = 1e-5;
  std::uint64_t seed = 0;
  bool random_phases = false;  ///< multiply initial orbitals by seeded unit phases
  bool exact = true;

  int effective_alpha_max() const { return alpha_max < 0 ? 2 * cutoff : alpha_max; }
  std::vector<double> output_times() const;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical JSON echo (keys sorted, all defaults filled in).
std::string config_to_json(const ScenarioConfig& config);

const char* to_string(ScenarioKind kind);

}  // namespace hfcheck
