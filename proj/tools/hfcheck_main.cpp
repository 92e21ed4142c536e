// hfcheck command-line driver.
//
//   hfcheck run      --config <path> --out <dir>
//   hfcheck family   --config <path> --n 2,3,4 --out <dir>
//   hfcheck selftest
//   hfcheck version
//
// Exit codes: 0 success, 1 failed checks or internal error, 2 usage or
// configuration error, 3 capacity/validation error, 4 integration or family
// member failure. Failures print a one-line JSON summary on stderr.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hfcheck/harness.hpp"
#include "hfcheck/selftest.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

int fail(int code, const std::string& kind, const std::string& message, const std::string& field = {}) {
  json err{{"kind", kind}, {"message", message}};
  if (!field.empty()) err["field"] = field;
  std::cerr << json{{"error", err}, {"exit_code", code}}.dump() << '\n';
  return code;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const hfcheck::ConfigError& e) {
    return fail(2, "config", e.what(), e.field());
  } catch (const hfcheck::CapacityError& e) {
    return fail(3, "capacity", e.what());
  } catch (const hfcheck::ValidationError& e) {
    return fail(3, "validation", e.what());
  } catch (const hfcheck::IntegrationError& e) {
    return fail(4, "integration", e.what());
  } catch (const hfcheck::FamilyError& e) {
    return fail(4, "family", e.what());
  } catch (const std::exception& e) {
    return fail(1, "internal", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hfcheck: Hartree-Fock vs exact fermion dynamics on the torus"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<int> family_n;

  auto* run = app.add_subcommand("run", "Run one scenario; writes trajectory.csv and manifest.json");
  run->add_option("--config", config_path, "Scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  auto* family = app.add_subcommand("family", "Run a scenario over several N; adds theorem_table.csv");
  family->add_option("--config", config_path, "Base scenario config (JSON)")->required();
  family->add_option("--n", family_n, "Comma-separated particle numbers, at least two")->required()->delimiter(',');
  family->add_option("--out", out_dir, "Output directory")->required();

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite (M <= 8)");
  auto* ver = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return fail(2, "usage", e.what());
  }

  if (*ver) {
    std::cout << "hfcheck " << hfcheck::version() << '\n';
    return 0;
  }
  if (*selftest) {
    return guarded([] {
      const hfcheck::SelftestReport rep = hfcheck::run_selftest();
      std::cout << rep.json() << '\n';
      return rep.passed() ? 0 : 1;
    });
  }
  if (*run) {
    return guarded([&] {
      const auto cfg = hfcheck::load_config(config_path);
      const auto res = hfcheck::run_scenario(cfg);
      hfcheck::write_run(out_dir, res);
      std::cout << json{{"out", out_dir},
                        {"rows", res.rows.size()},
                        {"bounds_dominate", res.summary.bounds_dominate},
                        {"wall_seconds", res.summary.wall_seconds}}
                       .dump()
                << '\n';
      return 0;
    });
  }
  return guarded([&] {
    const auto cfg = hfcheck::load_config(config_path);
    const auto fam = hfcheck::run_family(cfg, family_n, out_dir);
    std::cout << json{{"out", out_dir},
                      {"members", fam.members.size()},
                      {"all_hold", fam.all_hold},
                      {"trend_ok", fam.trend_ok},
                      {"wall_seconds", fam.wall_seconds}}
                     .dump()
              << '\n';
    return 0;
  });
}
