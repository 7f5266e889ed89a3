#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hsr/analytics.hpp"
#include "hsr/scenario.hpp"

namespace hsr {

inline constexpr std::string_view kToolVersion = "0.1.0";

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Scenario scenario;  // scenario.measurement_step is the grid step
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 20160101;
  MetricMode mode = MetricMode::Rederived;
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::string output_dir = "results";

  void validate() const {
    if (schemes.empty()) throw ConfigError("schemes", "at least one scheme is required");
    if (trials < 1) throw ConfigError("trials", "must be >= 1");
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& value) {
  if (value.empty()) throw ConfigError(key, "expected a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || errno == ERANGE) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
  return v;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  if (value.empty() || value[0] == '-' || value[0] == '+') {
    throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end != value.c_str() + value.size() || errno == ERANGE) {
    throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
  }
  return v;
}

inline std::vector<Scheme> parse_scheme_list(const std::string& key, const std::string& value) {
  std::vector<Scheme> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "all") {
      for (Scheme s : kAllSchemes) out.push_back(s);
      continue;
    }
    auto s = parse_scheme(item);
    if (!s) throw ConfigError(key, "unknown scheme '" + item + "'");
    bool seen = false;
    for (Scheme e : out) seen |= e == *s;
    if (!seen) out.push_back(*s);
  }
  if (out.empty()) throw ConfigError(key, "at least one scheme is required");
  return out;
}

inline MetricMode parse_mode(const std::string& key, const std::string& value) {
  if (value == "rederived") return MetricMode::Rederived;
  if (value == "paper" || value == "paper-literal") return MetricMode::PaperLiteral;
  throw ConfigError(key, "expected 'paper' or 'rederived', got '" + value + "'");
}

}  // namespace detail

inline std::vector<Scheme> parse_schemes(const std::string& list) {
  return detail::parse_scheme_list("schemes", list);
}
inline MetricMode parse_mode(const std::string& value) { return detail::parse_mode("mode", value); }

/// Parses flat `key = value` lines. `[section]` headers and `#`/`;` comments
/// are allowed; section names only group keys visually. Unspecified keys keep
/// their defaults and `dr` defaults to ds / n_raus.
inline RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  Scenario& sc = cfg.scenario;
  std::set<std::string> seen;
  bool dr_given = false;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    std::string line = detail::trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");

    auto num = [&] { return detail::parse_number(key, value); };
    if (key == "ds") sc.ds = num();
    else if (key == "dr") { sc.dr = num(); dr_given = true; }
    else if (key == "d0") sc.d0 = num();
    else if (key == "du") sc.du = num();
    else if (key == "train_length") sc.train_length = num();
    else if (key == "speed") sc.speed = num();
    else if (key == "n_raus") {
      const double n = num();
      if (n != std::floor(n) || n < 1 || n > 1e6) throw ConfigError(key, "must be an integer >= 1");
      sc.n_raus = static_cast<int>(n);
    }
    else if (key == "tx_power") sc.tx_power = num();
    else if (key == "shadow_sigma") sc.shadow_sigma = num();
    else if (key == "shadow_sigma_serving") sc.shadow_sigma_serving = num();
    else if (key == "shadow_sigma_target") sc.shadow_sigma_target = num();
    else if (key == "pathloss_a") sc.pathloss_a = num();
    else if (key == "pathloss_gamma") sc.pathloss_gamma = num();
    else if (key == "hysteresis") sc.hysteresis = num();
    else if (key == "threshold") sc.threshold = num();
    else if (key == "noise_density") sc.noise_density = num();
    else if (key == "grid_step") sc.measurement_step = num();
    else if (key == "scheme") {
      auto s = parse_scheme(value);
      if (!s) throw ConfigError(key, "unknown scheme '" + value + "'");
      sc.scheme = *s;
    }
    else if (key == "selection") {
      if (value == "max-rss") sc.selection = RauSelection::MaxRss;
      else if (value == "mean-pathloss") sc.selection = RauSelection::MeanPathloss;
      else throw ConfigError(key, "expected 'max-rss' or 'mean-pathloss'");
    }
    else if (key == "trials") cfg.trials = detail::parse_unsigned(key, value);
    else if (key == "master_seed") cfg.master_seed = detail::parse_unsigned(key, value);
    else if (key == "mode") cfg.mode = detail::parse_mode(key, value);
    else if (key == "schemes") cfg.schemes = detail::parse_scheme_list(key, value);
    else if (key == "output_dir") cfg.output_dir = value;
    else throw ConfigError(key, "unknown key");
  }
  if (!dr_given && sc.n_raus >= 1) sc.dr = sc.ds / sc.n_raus;

  // Map scenario invariant violations onto the offending key.
  struct Rule {
    const char* key;
    bool ok;
    const char* constraint;
  };
  const Rule rules[] = {
      {"ds", std::isfinite(sc.ds) && sc.ds > 0, "ds > 0"},
      {"dr", std::isfinite(sc.dr) && sc.dr > 0 && sc.dr <= sc.ds, "0 < dr <= ds"},
      {"d0", std::isfinite(sc.d0) && sc.d0 >= 0, "d0 >= 0"},
      {"du", std::isfinite(sc.du) && sc.du >= 0, "du >= 0"},
      {"train_length", std::isfinite(sc.train_length) && sc.train_length >= 0, "train_length >= 0"},
      {"speed", std::isfinite(sc.speed) && sc.speed > 0, "speed > 0"},
      {"shadow_sigma", std::isfinite(sc.shadow_sigma) && sc.shadow_sigma > 0, "shadow_sigma > 0"},
      {"shadow_sigma_serving", !sc.shadow_sigma_serving || *sc.shadow_sigma_serving > 0,
       "shadow_sigma_serving > 0"},
      {"shadow_sigma_target", !sc.shadow_sigma_target || *sc.shadow_sigma_target > 0,
       "shadow_sigma_target > 0"},
      {"hysteresis", std::isfinite(sc.hysteresis) && sc.hysteresis >= 0, "hysteresis >= 0"},
      {"grid_step", std::isfinite(sc.measurement_step) && sc.measurement_step > 0, "grid_step > 0"},
      {"tx_power", std::isfinite(sc.tx_power), "tx_power finite"},
      {"pathloss_a", std::isfinite(sc.pathloss_a), "pathloss_a finite"},
      {"pathloss_gamma", std::isfinite(sc.pathloss_gamma), "pathloss_gamma finite"},
      {"threshold", !std::isnan(sc.threshold), "threshold is a number"},
  };
  for (const auto& r : rules) {
    if (!r.ok) throw ConfigError(r.key, std::string("violates ") + r.constraint);
  }
  cfg.validate();
  return cfg;
}

/// Canonical `key=value` rendering of every setting that affects results.
inline std::string canonical_config(const RunConfig& cfg) {
  const Scenario& sc = cfg.scenario;
  std::string out;
  char buf[96];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s=%.17g\n", key, v);
    out += buf;
  };
  put("ds", sc.ds);
  put("dr", sc.dr);
  put("d0", sc.d0);
  put("du", sc.du);
  put("train_length", sc.train_length);
  put("speed", sc.speed);
  put("n_raus", sc.n_raus);
  put("tx_power", sc.tx_power);
  put("shadow_sigma", sc.shadow_sigma);
  put("shadow_sigma_serving", sc.sigma(Cell::Serving));
  put("shadow_sigma_target", sc.sigma(Cell::Target));
  put("pathloss_a", sc.pathloss_a);
  put("pathloss_gamma", sc.pathloss_gamma);
  put("hysteresis", sc.hysteresis);
  put("threshold", sc.threshold);
  put("noise_density", sc.noise_density);
  put("grid_step", sc.measurement_step);
  out += "selection=";
  out += sc.selection == RauSelection::MaxRss ? "max-rss\n" : "mean-pathloss\n";
  out += "schemes=";
  for (std::size_t k = 0; k < cfg.schemes.size(); ++k) {
    if (k) out += ',';
    out += to_string(cfg.schemes[k]);
  }
  out += '\n';
  return out;
}

/// FNV-1a 64-bit hash of the canonical configuration, as 16 hex digits.
inline std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace hsr
