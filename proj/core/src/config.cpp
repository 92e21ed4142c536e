#include "hfcheck/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hfcheck {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(join(path, key), "missing required key");
  return *it;
}

const json& object_at(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  return j;
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError(path, "integer out of range");
  }
  return static_cast<int>(v);
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "expected a finite number");
  return v;
}

double positive(const json& j, const std::string& path) {
  const double v = as_double(j, path);
  if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
  return v;
}

std::vector<Potential::Term> parse_terms(const json& j, const std::string& path, int dim) {
  if (!j.is_array()) throw ConfigError(path, "expected a list of {p, v} records");
  std::vector<Potential::Term> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = index(path, i);
    const json& rec = object_at(j[i], at);
    reject_unknown(rec, at, {"p", "v"});
    const json& p = require(rec, at, "p");
    Potential::Term t;
    if (p.is_number_integer()) {
      t.p = {as_int(p, join(at, "p"))};
    } else if (p.is_array()) {
      for (std::size_t c = 0; c < p.size(); ++c) t.p.push_back(as_int(p[c], index(join(at, "p"), c)));
    } else {
      throw ConfigError(join(at, "p"), "expected an integer vector");
    }
    if (static_cast<int>(t.p.size()) != dim) {
      throw ConfigError(join(at, "p"), "has " + std::to_string(t.p.size()) + " components, d = " + std::to_string(dim));
    }
    t.v = as_double(require(rec, at, "v"), join(at, "v"));
    out.push_back(std::move(t));
  }
  // Symmetry and duplicates are checked by Potential; rethrow with the path.
  try {
    (void)Potential(dim, out);
  } catch (const ValidationError& e) {
    throw ConfigError(path, e.what());
  }
  return out;
}

json terms_json(const std::vector<Potential::Term>& terms) {
  json arr = json::array();
  for (const auto& t : terms) arr.push_back({{"p", t.p}, {"v", t.v}});
  return arr;
}

}  // namespace

const char* to_string(ScenarioKind kind) { return kind == ScenarioKind::trapped ? "trapped" : "fermi_ball"; }

std::vector<double> ScenarioConfig::output_times() const {
  const double steps = t_final / output_dt;
  const auto n = static_cast<long>(std::llround(steps));
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) t.push_back(static_cast<double>(i) * output_dt);
  t.back() = t_final;
  return t;
}

ScenarioConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  object_at(root, "");
  reject_unknown(root, "", {"d", "K", "scenario", "potential", "t_final", "output_dt", "integrator", "alpha_max",
                            "fd_delta_over_hbar", "seed", "random_phases", "exact"});

  ScenarioConfig c;
  if (root.contains("d")) c.dim = as_int(root["d"], "d");
  if (c.dim < 1 || c.dim > 3) throw ConfigError("d", "must be 1, 2 or 3");
  c.cutoff = as_int(require(root, "", "K"), "K");
  if (c.cutoff < 1) throw ConfigError("K", "must be >= 1");

  const json& sc = object_at(require(root, "", "scenario"), "scenario");
  const std::string kind = [&] {
    const json& k = require(sc, "scenario", "kind");
    if (!k.is_string()) throw ConfigError("scenario.kind", "expected a string");
    return k.get<std::string>();
  }();
  if (kind == "trapped") {
    c.kind = ScenarioKind::trapped;
    reject_unknown(sc, "scenario", {"kind", "N", "W"});
    c.particles = as_int(require(sc, "scenario", "N"), "scenario.N");
    if (c.particles < 1) throw ConfigError("scenario.N", "must be >= 1");
    if (sc.contains("W")) c.trap = parse_terms(sc["W"], "scenario.W", c.dim);
  } else if (kind == "fermi_ball") {
    c.kind = ScenarioKind::fermi_ball;
    reject_unknown(sc, "scenario", {"kind", "k_F"});
    c.k_fermi = as_double(require(sc, "scenario", "k_F"), "scenario.k_F");
    if (c.k_fermi < 0.0) throw ConfigError("scenario.k_F", "must be >= 0");
  } else {
    throw ConfigError("scenario.kind", "expected \"trapped\" or \"fermi_ball\", got \"" + kind + "\"");
  }

  if (root.contains("potential")) c.potential = parse_terms(root["potential"], "potential", c.dim);
  c.t_final = as_double(require(root, "", "t_final"), "t_final");
  if (c.t_final < 0.0) throw ConfigError("t_final", "must be >= 0");
  c.output_dt = positive(require(root, "", "output_dt"), "output_dt");
  {
    const double steps = c.t_final / c.output_dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      throw ConfigError("output_dt", "must divide t_final");
    }
    if (steps > 1e6) throw ConfigError("output_dt", "more than 10^6 output times");
  }

  if (root.contains("integrator")) {
    const json& in = object_at(root["integrator"], "integrator");
    reject_unknown(in, "integrator", {"rtol", "dt_max_over_hbar", "dt_min"});
    if (in.contains("rtol")) c.integrator.rtol = positive(in["rtol"], "integrator.rtol");
    if (in.contains("dt_max_over_hbar")) {
      c.integrator.dt_max_over_hbar = positive(in["dt_max_over_hbar"], "integrator.dt_max_over_hbar");
    }
    if (in.contains("dt_min")) c.integrator.dt_min = positive(in["dt_min"], "integrator.dt_min");
  }
  if (root.contains("alpha_max")) {
    c.alpha_max = as_int(root["alpha_max"], "alpha_max");
    if (c.alpha_max < 1) throw ConfigError("alpha_max", "must be >= 1");
  }
  if (root.contains("fd_delta_over_hbar")) {
    c.fd_delta_over_hbar = positive(root["fd_delta_over_hbar"], "fd_delta_over_hbar");
  }
  if (root.contains("seed")) {
    const json& s = root["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ConfigError("seed", "expected a non-negative integer");
    }
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("random_phases")) {
    if (!root["random_phases"].is_boolean()) throw ConfigError("random_phases", "expected true or false");
    c.random_phases = root["random_phases"].get<bool>();
  }
  if (root.contains("exact")) {
    if (!root["exact"].is_boolean()) throw ConfigError("exact", "expected true or false");
    c.exact = root["exact"].get<bool>();
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
  json sc{{"kind", to_string(c.kind)}};
  if (c.kind == ScenarioKind::trapped) {
    sc["N"] = c.particles;
    sc["W"] = terms_json(c.trap);
  } else {
    sc["k_F"] = c.k_fermi;
  }
  json j{{"d", c.dim},
         {"K", c.cutoff},
         {"scenario", sc},
         {"potential", terms_json(c.potential)},
         {"t_final", c.t_final},
         {"output_dt", c.output_dt},
         {"integrator",
          {{"rtol", c.integrator.rtol},
           {"dt_max_over_hbar", c.integrator.dt_max_over_hbar},
           {"dt_min", c.integrator.dt_min}}},
         {"alpha_max", c.effective_alpha_max()},
         {"fd_delta_over_hbar", c.fd_delta_over_hbar},
         {"seed", c.seed},
         {"random_phases", c.random_phases},
         {"exact", c.exact}};
  return j.dump(2);
}

}  // namespace hfcheck
