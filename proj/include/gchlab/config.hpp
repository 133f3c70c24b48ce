#ifndef GCHLAB_CONFIG_HPP
#define GCHLAB_CONFIG_HPP

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gchlab/errors.hpp"

namespace gchlab {

/*
 * Experiment configuration: a flat key-value document.
 *
 *   kind = "simulate"      # comment
 *   T = 1.0
 *   [grid]
 *   N = 4096
 *
 * Keys before the first section header are top-level. Strings are quoted,
 * numbers bare, booleans true/false. Every key has a schema entry with a type
 * and default; unknown keys and type mismatches are errors naming the line.
 */

enum class ValueType { number, integer, boolean, string };

using ConfigValue = std::variant<double, std::int64_t, bool, std::string>;

struct KeySpec {
  std::string name;  // "section.key" or "key" for top-level
  ValueType type;
  ConfigValue def;
  const char* doc;
};

inline const std::vector<KeySpec>& config_schema() {
  using V = ConfigValue;
  static const std::vector<KeySpec> schema = {
      {"kind", ValueType::string, V{std::string()}, "experiment kind"},
      {"seed", ValueType::integer, V{std::int64_t{0}}, "RNG seed"},
      {"T", ValueType::number, V{1.0}, "end time / horizon"},
      {"c", ValueType::number, V{1.0}, "peakon speed"},

      {"grid.L", ValueType::number, V{40.0}, "half width of [-L, L)"},
      {"grid.N", ValueType::integer, V{std::int64_t{4096}}, "grid points (power of two)"},

      {"solver.sigma", ValueType::number, V{0.3}, "CFL factor"},
      {"solver.dt", ValueType::number, V{0.0}, "fixed step, 0 for CFL"},
      {"solver.growth_cap", ValueType::number, V{0.0}, "dt <= growth_cap / max|u_xx| when > 0"},
      {"solver.dealias", ValueType::boolean, V{true}, "2/3 rule"},
      {"solver.cadence", ValueType::integer, V{std::int64_t{10}}, "monitor every k steps"},
      {"solver.rhs_form", ValueType::string, V{std::string("spectral_form")}, "spectral_form | m_form | u_form"},
      {"solver.tail_tol", ValueType::number, V{1e-3}, "resolution stop threshold"},
      {"solver.resolved_tail_tol", ValueType::number, V{1e-6}, "u_xx tail threshold for resolved samples"},
      {"solver.snapshot_interval", ValueType::number, V{0.0}, "time between stored snapshots, 0 for none"},
      {"solver.write_snapshots", ValueType::boolean, V{false}, "write snapshots.bin and sidecar"},

      {"initial.profile", ValueType::string, V{std::string("peakon")}, "peakon | gaussian | zero"},
      {"initial.amplitude", ValueType::number, V{1.0}, "gaussian amplitude"},
      {"initial.width", ValueType::number, V{1.0}, "gaussian standard deviation"},
      {"initial.center", ValueType::number, V{0.0}, "gaussian center"},

      {"peakon.levels", ValueType::integer, V{std::int64_t{5}}, "quadrature refinement levels"},
      {"peakon.base", ValueType::integer, V{std::int64_t{50}}, "cells per direction on the coarsest level"},
      {"peakon.tolerance", ValueType::number, V{1e-4}, "residual required on the finest level"},
      {"peakon.min_order", ValueType::number, V{1.5}, "required fitted order"},
      {"peakon.crest_split", ValueType::boolean, V{false}, "insert the crest as a quadrature node"},
      {"peakon.experimental", ValueType::boolean, V{false}, "allow c <= 0"},

      {"blowup.amplitudes", ValueType::string, V{std::string("0.00625")}, "comma-separated A values"},
      {"blowup.width", ValueType::number, V{0.025}, "gaussian width s of u0 = A exp(-x^2/(2 s^2))"},
      {"blowup.window", ValueType::integer, V{std::int64_t{20}}, "fit window K"},
      {"blowup.slack", ValueType::number, V{1.1}, "T_est <= slack * bound"},
      {"blowup.control", ValueType::boolean, V{false}, "also run the peakon control"},
      {"blowup.control_T", ValueType::number, V{2.0}, "end time of the control run"},
      {"blowup.control_L", ValueType::number, V{40.0}, "half width of the control grid"},
      {"blowup.control_N", ValueType::integer, V{std::int64_t{4096}}, "points of the control grid"},

      {"picard.n_max", ValueType::integer, V{std::int64_t{10}}, "iterations"},
      {"picard.dt", ValueType::number, V{0.01}, "transport step"},
      {"picard.s", ValueType::number, V{1.5}, "Besov smoothness"},
      {"picard.C_cal", ValueType::number, V{1.0}, "calibration constant"},
      {"picard.ratio_limit", ValueType::number, V{0.75}, "decay ratio bound after burn-in"},
      {"picard.burn_in", ValueType::integer, V{std::int64_t{3}}, "first n whose ratio is checked"},
      {"picard.direct_tol", ValueType::number, V{1e-4}, "L2 agreement with the direct solver"},

      {"audit.which", ValueType::string, V{std::string("all")}, "audit kind or all"},
      {"audit.corpus", ValueType::string, V{std::string("bandlimited")}, "bandlimited | gaussian_mix"},
      {"audit.count", ValueType::integer, V{std::int64_t{100}}, "corpus size"},
      {"audit.max_mode", ValueType::integer, V{std::int64_t{24}}, "highest mode of bandlimited fields"},
      {"audit.s", ValueType::number, V{2.0}, "smoothness"},
      {"audit.theta", ValueType::number, V{0.5}, "interpolation weight"},
      {"audit.s1", ValueType::number, V{0.0}, "interpolation lower index"},
      {"audit.s2", ValueType::number, V{2.0}, "interpolation upper index"},
      {"audit.tolerance", ValueType::number, V{0.15}, "allowed drift of fitted constants"},

      {"transport.dt", ValueType::number, V{0.05}, "step of the constant-advection check"},
      {"transport.speed", ValueType::number, V{0.7}, "constant advection speed"},
      {"transport.min_order", ValueType::number, V{3.0}, "required manufactured-solution order"},

      {"output.svg_timestamp", ValueType::boolean, V{false}, "timestamp comment in plot.svg"},
  };
  return schema;
}

inline const KeySpec* find_key(const std::string& name) {
  for (const auto& k : config_schema())
    if (k.name == name) return &k;
  return nullptr;
}

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = {"simulate", "peakon-verify", "blowup-study",
                                                 "picard",   "besov-audit",   "transport-test"};
  return kinds;
}

/// Validated configuration with every schema key present.
class ExperimentConfig {
 public:
  ExperimentConfig() {
    for (const auto& k : config_schema()) values_[k.name] = k.def;
  }

  double number(const std::string& key) const { return std::get<double>(at(key, ValueType::number)); }
  std::int64_t integer(const std::string& key) const { return std::get<std::int64_t>(at(key, ValueType::integer)); }
  bool boolean(const std::string& key) const { return std::get<bool>(at(key, ValueType::boolean)); }
  const std::string& string(const std::string& key) const { return std::get<std::string>(at(key, ValueType::string)); }

  void set(const std::string& key, ConfigValue v) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    if (v.index() != static_cast<std::size_t>(spec->type))
      throw ConfigError("key '" + key + "' has the wrong type");
    values_[key] = std::move(v);
  }

  const std::string& kind() const { return string("kind"); }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed")); }

  const std::map<std::string, ConfigValue>& values() const { return values_; }
  bool operator==(const ExperimentConfig& o) const { return values_ == o.values_; }

  /// Semantic checks beyond types.
  void validate() const {
    const auto& k = kind();
    bool known = false;
    for (const auto& e : experiment_kinds()) known = known || e == k;
    if (!known) throw ConfigError("key 'kind': unknown experiment kind '" + k + "'");
    if (!(number("T") > 0.0)) throw ConfigError("key 'T' must be positive");
    if (!(number("grid.L") > 0.0)) throw ConfigError("key 'grid.L' must be positive");
    const auto n = integer("grid.N");
    if (n < 16 || (n & (n - 1)) != 0) throw ConfigError("key 'grid.N' must be a power of two >= 16");
    const double sigma = number("solver.sigma");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw ConfigError("key 'solver.sigma' must lie in (0, 1]");
    if (integer("solver.cadence") < 1) throw ConfigError("key 'solver.cadence' must be >= 1");
    const auto& prof = string("initial.profile");
    if (prof != "peakon" && prof != "gaussian" && prof != "zero")
      throw ConfigError("key 'initial.profile' must be peakon, gaussian or zero");
    if (integer("peakon.levels") < 2) throw ConfigError("key 'peakon.levels' must be >= 2");
    if (integer("picard.n_max") < 1) throw ConfigError("key 'picard.n_max' must be >= 1");
    if (integer("audit.count") < 1) throw ConfigError("key 'audit.count' must be >= 1");
  }

 private:
  const ConfigValue& at(const std::string& key, ValueType t) const {
    auto it = values_.find(key);
    const KeySpec* spec = find_key(key);
    if (it == values_.end() || !spec || spec->type != t)
      throw ConfigError("config: no " + key + " of the requested type");
    return it->second;
  }

  std::map<std::string, ConfigValue> values_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::string line_error(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

// Removes a trailing # comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline ConfigValue parse_value(const std::string& raw, const KeySpec& spec, std::size_t line) {
  const std::string& key = spec.name;
  switch (spec.type) {
    case ValueType::string: {
      if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"')
        throw ConfigError(line_error(line, "key '" + key + "' expects a quoted string"));
      return raw.substr(1, raw.size() - 2);
    }
    case ValueType::boolean:
      if (raw == "true") return true;
      if (raw == "false") return false;
      throw ConfigError(line_error(line, "key '" + key + "' expects true or false"));
    case ValueType::integer: {
      errno = 0;
      char* end = nullptr;
      const long long v = std::strtoll(raw.c_str(), &end, 10);
      if (raw.empty() || *end != '\0' || errno == ERANGE)
        throw ConfigError(line_error(line, "key '" + key + "' expects an integer, got '" + raw + "'"));
      return static_cast<std::int64_t>(v);
    }
    case ValueType::number: {
      errno = 0;
      char* end = nullptr;
      const double v = std::strtod(raw.c_str(), &end);
      if (raw.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v) || raw.front() == '"')
        throw ConfigError(line_error(line, "key '" + key + "' expects a number, got '" + raw + "'"));
      return v;
    }
  }
  throw ConfigError(line_error(line, "unsupported type"));
}

inline std::string format_value(const ConfigValue& v) {
  if (std::holds_alternative<double>(v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", std::get<double>(v));
    return buf;
  }
  if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  return "\"" + std::get<std::string>(v) + "\"";
}

}  // namespace detail

/// Parses the document and fills defaults. `kind` must be present unless
/// supplied by the caller afterwards; call validate() once complete.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw_line, section;
  std::size_t line = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, raw_line)) {
    ++line;
    const std::string s = detail::trim(detail::strip_comment(raw_line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']' || s.size() < 3) throw ConfigError(detail::line_error(line, "malformed section header"));
      section = detail::trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const auto& k : config_schema())
        known = known || k.name.rfind(section + ".", 0) == 0;
      if (!known) throw ConfigError(detail::line_error(line, "unknown section [" + section + "]"));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(detail::line_error(line, "expected key = value"));
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;
    const KeySpec* spec = find_key(full);
    if (!spec) throw ConfigError(detail::line_error(line, "unknown key '" + full + "'"));
    if (auto it = seen.find(full); it != seen.end())
      throw ConfigError(detail::line_error(line, "duplicate key '" + full + "' (first on line " +
                                                     std::to_string(it->second) + ")"));
    seen[full] = line;
    cfg.set(full, detail::parse_value(value, *spec, line));
  }
  return cfg;
}

/// Canonical text form with every key; parse_config(echo_config(c)) == c.
inline std::string echo_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  std::string section = "";
  for (const auto& k : config_schema()) {
    const auto dot = k.name.find('.');
    const std::string sec = dot == std::string::npos ? "" : k.name.substr(0, dot);
    const std::string key = dot == std::string::npos ? k.name : k.name.substr(dot + 1);
    if (sec != section) {
      out << "\n[" << sec << "]\n";
      section = sec;
    }
    out << key << " = " << detail::format_value(cfg.values().at(k.name)) << "\n";
  }
  return out.str();
}

}  // namespace gchlab

#endif  // GCHLAB_CONFIG_HPP
