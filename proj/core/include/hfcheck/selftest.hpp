#pragma once

// Invariant suite at M <= 8, run by `hfcheck selftest`. Each check reports
// its worst residual against a fixed tolerance.

#include <cstdint>
#include <string>
#include <vector>

namespace hfcheck {

struct SelftestCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  double seconds = 0.0;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;
  bool passed() const;
  std::string json() const;
};

SelftestReport run_selftest(std::uint64_t seed = 20240601);

}  // namespace hfcheck
