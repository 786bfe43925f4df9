#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "minimaxq/estimators/spec.hpp"
#include "minimaxq/problems/registry.hpp"

namespace minimaxq {

// Usage or configuration problem; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("config key " + key + ": not a number: " + text);
  return v;
}

// Flat "dotted.key = value" lines; '#' starts a comment.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>") {
    Config c;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = source + ":" + std::to_string(lineno);
      if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key.empty() || key.find(' ') != std::string::npos) throw ConfigError(where + ": bad key '" + key + "'");
      if (!c.values_.emplace(key, value).second) throw ConfigError(where + ": duplicate key " + key);
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    return parse(in, path);
  }

  static Config from_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  std::optional<std::string> get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }
  std::string str(const std::string& key, const std::string& fallback) const { return get(key).value_or(fallback); }
  double num(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? parse_number(key, *v) : fallback;
  }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  // Keys under "prefix." with the prefix stripped.
  std::map<std::string, std::string> section(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string p = prefix + ".";
    for (const auto& [k, v] : values_)
      if (k.compare(0, p.size(), p) == 0) out[k.substr(p.size())] = v;
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::string problem;
  ProblemParams params;  // without n; design_delta only when pinned
  std::vector<int> ns;
  std::optional<EstimatorSpec> estimator;  // problem default when absent
  std::size_t reps = 1000;
  std::vector<double> deltas = {0.05};
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;  // empty: stdout
  std::string format = "csv";
  double lb_scale = 1.0, ub_scale = 1.0;
};

inline const std::vector<std::string>& config_sections() {
  static const std::vector<std::string> s = {"problem", "estimator", "experiment", "output", "lb", "ub", "pack"};
  return s;
}

inline ExperimentConfig experiment_config(const Config& c) {
  for (const auto& [k, v] : c.values()) {
    const auto dot = k.find('.');
    const std::string sec = dot == std::string::npos ? k : k.substr(0, dot);
    if (std::find(config_sections().begin(), config_sections().end(), sec) == config_sections().end())
      throw ConfigError("unknown config key " + k);
  }
  ExperimentConfig e;
  const auto name = c.get("problem.name");
  if (!name) throw ConfigError("config is missing problem.name");
  if (std::find(problem_names().begin(), problem_names().end(), *name) == problem_names().end())
    throw ConfigError("unknown problem: " + *name);
  e.problem = *name;
  for (const auto& [k, v] : c.section("problem"))
    if (k != "name" && k != "n") e.params.values[k] = v;

  for (const auto& item : split_list(c.str("problem.n", "100"))) {
    const double n = parse_number("problem.n", item);
    if (!(n >= 1.0 && n == std::floor(n) && n < 2e9)) throw ConfigError("problem.n must be positive integers");
    e.ns.push_back(static_cast<int>(n));
  }
  if (e.ns.empty()) throw ConfigError("problem.n is empty");

  if (const auto kind = c.get("estimator.kind")) {
    EstimatorSpec spec;
    try {
      spec.kind = parse_estimator_kind(*kind);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what());
    }
    for (const auto& [k, v] : c.section("estimator"))
      if (k != "kind") spec.params[k] = parse_number("estimator." + k, v);
    e.estimator = spec;
  } else if (c.section("estimator").size()) {
    throw ConfigError("estimator parameters given without estimator.kind");
  }

  const double reps = c.num("experiment.reps", 1000.0);
  if (!(reps >= 1.0 && reps == std::floor(reps) && reps <= 1e9)) throw ConfigError("experiment.reps must be >= 1");
  e.reps = static_cast<std::size_t>(reps);
  if (const auto ds = c.get("experiment.deltas")) {
    e.deltas.clear();
    for (const auto& item : split_list(*ds)) e.deltas.push_back(parse_number("experiment.deltas", item));
  }
  if (e.deltas.empty()) throw ConfigError("experiment.deltas is empty");
  for (double d : e.deltas)
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("experiment.deltas must lie in (0,1]");
  if (const auto s = c.get("experiment.seed")) {
    try {
      std::size_t used = 0;
      if (s->empty() || s->front() == '-') throw std::invalid_argument("sign");
      e.seed = std::stoull(*s, &used);
      if (used != s->size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("experiment.seed must be an unsigned integer");
    }
  }
  const double threads = c.num("experiment.threads", 1.0);
  if (!(threads >= 1.0 && threads == std::floor(threads) && threads <= 1024)) throw ConfigError("experiment.threads must be >= 1");
  e.threads = static_cast<unsigned>(threads);
  e.out = c.str("output.path", "");
  e.format = c.str("output.format", "csv");
  if (e.format != "csv" && e.format != "json") throw ConfigError("output.format must be csv or json");
  e.lb_scale = c.num("lb.scale", 1.0);
  e.ub_scale = c.num("ub.scale", 1.0);
  if (!(e.lb_scale > 0.0 && e.ub_scale > 0.0)) throw ConfigError("lb.scale and ub.scale must be positive");
  return e;
}

}  // namespace minimaxq
