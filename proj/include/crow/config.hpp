#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "crow/biphoton.hpp"

namespace crow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully validated run configuration assembled from a flat `key = value` file.
struct RunConfig {
  CrowParams crow;
  PumpConfig pump;
  int n_half = 512;
  double t_max_tau = 40.0;
  int n_steps = 2048;
  int p = 40;
  int p_prime = -40;
  std::string out_dir = "out";
  std::vector<std::string> defaults_applied;
  // Resolved scalar keys for the run manifest, insertion-ordered by key.
  std::map<std::string, std::string> resolved;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& key, const std::string& value, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line) + ": malformed value for '" + key +
                      "': " + value);
  }
}

inline int parse_int(const std::string& key, const std::string& value, int line) {
  const double v = parse_double(key, value, line);
  const int i = static_cast<int>(v);
  if (double(i) != v)
    throw ConfigError("line " + std::to_string(line) + ": '" + key + "' must be an integer");
  return i;
}

}  // namespace detail

// Parses the line-oriented config text.  Unknown keys are hard errors; every
// violated precondition is reported with the offending key.
inline RunConfig parse_config(const std::string& text) {
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> kv;
  {
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
      size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty() || value.empty())
        throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
      if (kv.count(key))
        throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
      kv[key] = {value, line_no};
      if (pos > text.size()) break;
    }
  }

  static const std::set<std::string> known = {
      "crow.omega_F_re", "crow.omega_F_im", "crow.beta1_re",  "crow.beta1_im",
      "crow.D_um",       "crow.tau_def",    "pump.k0D_over_pi", "pump.lambda_P_nm",
      "pump.sigma_plus_D", "pump.sigma_minus_D", "pump.beta",  "physical.chi2_pm_per_V",
      "physical.n_index", "grid.n_half",    "time.t_max_tau", "time.n_steps",
      "cavities.p",      "cavities.p_prime", "output.dir"};
  for (const auto& [key, entry] : kv)
    if (!known.count(key))
      throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" + key + "'");

  RunConfig cfg;
  auto getd = [&](const std::string& key, double def) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      cfg.defaults_applied.push_back(key);
      return def;
    }
    return detail::parse_double(key, it->second.value, it->second.line);
  };
  auto geti = [&](const std::string& key, int def) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      cfg.defaults_applied.push_back(key);
      return def;
    }
    return detail::parse_int(key, it->second.value, it->second.line);
  };
  auto has = [&](const std::string& key) { return kv.count(key) != 0; };

  cfg.crow.omega_F = cplx(getd("crow.omega_F_re", 0.305), getd("crow.omega_F_im", -7.71e-6));
  cfg.crow.beta1 = cplx(getd("crow.beta1_re", 9.87e-3), getd("crow.beta1_im", -1.97e-5));
  cfg.crow.period = getd("crow.D_um", 0.9) * 1e-6;
  cfg.crow.tau = getd("crow.tau_def", 0.0);

  cfg.pump.sigma_plus_D = getd("pump.sigma_plus_D", 0.28);
  cfg.pump.sigma_minus_D = getd("pump.sigma_minus_D", 0.28);
  cfg.pump.beta_squeeze = getd("pump.beta", 2.2);

  std::optional<double> lambda_P_nm;
  if (has("pump.lambda_P_nm")) lambda_P_nm = getd("pump.lambda_P_nm", 0.0);

  try {
    cfg.crow.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("crow.*: ") + e.what());
  }

  if (has("pump.k0D_over_pi")) {
    cfg.pump.k0D = getd("pump.k0D_over_pi", 0.5) * kPi;
  } else if (lambda_P_nm) {
    const double omega_P = cfg.crow.period / (2.0 * (*lambda_P_nm * 1e-9));
    try {
      cfg.pump.k0D = k0_from_pump(cfg.crow, omega_P);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("pump.lambda_P_nm: ") + e.what());
    }
  } else {
    cfg.defaults_applied.push_back("pump.k0D_over_pi");
    cfg.pump.k0D = 0.5 * kPi;
  }

  if (lambda_P_nm) {
    PhysicalPump phys;
    phys.lambda_P = *lambda_P_nm * 1e-9;
    phys.chi2 = getd("physical.chi2_pm_per_V", 100.0) * 1e-12;
    phys.n_index = getd("physical.n_index", 3.4);
    if (!(phys.chi2 > 0.0)) throw ConfigError("physical.chi2_pm_per_V: must be positive");
    if (!(phys.n_index > 0.0)) throw ConfigError("physical.n_index: must be positive");
    cfg.pump.physical = phys;
  } else if (has("physical.chi2_pm_per_V") || has("physical.n_index")) {
    throw ConfigError("physical.*: requires pump.lambda_P_nm to be set");
  }

  try {
    cfg.pump.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("pump.*: ") + e.what());
  }

  cfg.n_half = geti("grid.n_half", 512);
  if (cfg.n_half < 2) throw ConfigError("grid.n_half: must be >= 2");
  cfg.t_max_tau = getd("time.t_max_tau", 40.0);
  if (!(cfg.t_max_tau > 0.0)) throw ConfigError("time.t_max_tau: must be positive");
  cfg.n_steps = geti("time.n_steps", 2048);
  if (cfg.n_steps < 2) throw ConfigError("time.n_steps: must be >= 2");
  cfg.p = geti("cavities.p", 40);
  cfg.p_prime = geti("cavities.p_prime", -40);
  {
    auto it = kv.find("output.dir");
    if (it == kv.end())
      cfg.defaults_applied.push_back("output.dir");
    else
      cfg.out_dir = it->second.value;
  }

  for (const auto& [key, entry] : kv) cfg.resolved[key] = entry.value;
  return cfg;
}

}  // namespace crow
