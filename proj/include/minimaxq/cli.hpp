#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "minimaxq/config.hpp"
#include "minimaxq/montecarlo.hpp"
#include "minimaxq/packing.hpp"
#include "minimaxq/problems/registry.hpp"

namespace minimaxq {

// Unreadable input or unwritable output; exit code 2 like usage errors.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0, kExitFail = 1, kExitUsage = 2;

// Command-line overrides; unset fields fall back to the config.
struct CliOptions {
  std::optional<std::string> config, out, format, results;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> d, s;
  std::optional<std::size_t> max_words;
};

struct ResultRow {
  std::string problem;
  int n = 0, d = 0;
  double delta = 0.0;
  std::string estimator;
  std::optional<double> lb;
  double emp_q_lo = 0.0, emp_q = 0.0, emp_q_hi = 0.0;
  std::optional<double> ub;
  std::size_t reps = 0;
  std::uint64_t seed = 0;

  SandwichVerdict verdict() const {
    QuantileEstimate q;
    q.delta = delta;
    q.value = emp_q;
    q.reps = reps;
    q.dkw_lo = emp_q_lo;
    q.dkw_hi = emp_q_hi;
    return sandwich_check(lb, q, ub);
  }
};

inline const std::string kCsvHeader = "problem,n,d,delta,estimator,lb,emp_q_lo,emp_q,emp_q_hi,ub,reps,seed";

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_double(*x) : "n/a"; }

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string format_range(const DeltaRange& r) {
  return "(0," + format_double(r.max) + (r.inclusive ? "]" : ")");
}

inline std::string join_kinds(const std::vector<EstimatorKind>& ks, const std::string& empty) {
  if (ks.empty()) return empty;
  std::string out;
  for (auto k : ks) out += (out.empty() ? "" : ";") + to_string(k);
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows)
    os << r.problem << ',' << r.n << ',' << r.d << ',' << format_double(r.delta) << ',' << r.estimator << ','
       << format_optional(r.lb) << ',' << format_double(r.emp_q_lo) << ',' << format_double(r.emp_q) << ','
       << format_double(r.emp_q_hi) << ',' << format_optional(r.ub) << ',' << r.reps << ',' << r.seed << '\n';
}

inline nlohmann::ordered_json optional_json(const std::optional<double>& x) {
  return x ? nlohmann::ordered_json(*x) : nlohmann::ordered_json(nullptr);
}

inline void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows)
    arr.push_back({{"problem", r.problem},
                   {"n", r.n},
                   {"d", r.d},
                   {"delta", r.delta},
                   {"estimator", r.estimator},
                   {"lb", optional_json(r.lb)},
                   {"emp_q_lo", r.emp_q_lo},
                   {"emp_q", r.emp_q},
                   {"emp_q_hi", r.emp_q_hi},
                   {"ub", optional_json(r.ub)},
                   {"reps", r.reps},
                   {"seed", r.seed}});
  os << arr.dump(2) << '\n';
}

inline std::vector<ResultRow> parse_results_csv(std::istream& in, const std::string& source = "<results>") {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader)
    throw ConfigError(source + ": expected header " + kCsvHeader);
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(trim(item));
    const std::string where = source + ":" + std::to_string(lineno);
    if (f.size() != 12) throw ConfigError(where + ": expected 12 fields");
    auto num = [&](const std::string& key, const std::string& s) { return parse_number(where + " " + key, s); };
    auto opt = [&](const std::string& key, const std::string& s) -> std::optional<double> {
      if (s == "n/a") return std::nullopt;
      return num(key, s);
    };
    auto whole = [&](const std::string& key, const std::string& s) {
      const double v = num(key, s);
      if (!(v >= 0.0 && v == std::floor(v))) throw ConfigError(where + ": " + key + " must be a non-negative integer");
      return v;
    };
    ResultRow r;
    r.problem = f[0];
    r.n = static_cast<int>(whole("n", f[1]));
    r.d = static_cast<int>(whole("d", f[2]));
    r.delta = num("delta", f[3]);
    r.estimator = f[4];
    r.lb = opt("lb", f[5]);
    r.emp_q_lo = num("emp_q_lo", f[6]);
    r.emp_q = num("emp_q", f[7]);
    r.emp_q_hi = num("emp_q_hi", f[8]);
    r.ub = opt("ub", f[9]);
    r.reps = static_cast<std::size_t>(whole("reps", f[10]));
    try {
      r.seed = std::stoull(f[11]);
    } catch (const std::exception&) {
      throw ConfigError(where + ": bad seed");
    }
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<ResultRow> parse_results_json(std::istream& in, const std::string& source = "<results>") {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(source + ": " + ex.what());
  }
  if (!arr.is_array()) throw ConfigError(source + ": expected an array of rows");
  std::vector<ResultRow> rows;
  try {
    for (const auto& o : arr) {
      ResultRow r;
      r.problem = o.at("problem").get<std::string>();
      r.n = o.at("n").get<int>();
      r.d = o.at("d").get<int>();
      r.delta = o.at("delta").get<double>();
      r.estimator = o.at("estimator").get<std::string>();
      if (!o.at("lb").is_null()) r.lb = o.at("lb").get<double>();
      r.emp_q_lo = o.at("emp_q_lo").get<double>();
      r.emp_q = o.at("emp_q").get<double>();
      r.emp_q_hi = o.at("emp_q_hi").get<double>();
      if (!o.at("ub").is_null()) r.ub = o.at("ub").get<double>();
      r.reps = o.at("reps").get<std::size_t>();
      r.seed = o.at("seed").get<std::uint64_t>();
      rows.push_back(r);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(source + ": " + ex.what());
  }
  return rows;
}

inline std::vector<ResultRow> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read results file " + path);
  const int c = (in >> std::ws).peek();
  if (c == '[') return parse_results_json(in, path);
  return parse_results_csv(in, path);
}

inline void write_rows(std::ostream& os, const std::vector<ResultRow>& rows, const std::string& format) {
  if (format == "json")
    write_json(os, rows);
  else
    write_csv(os, rows);
}

// Writes text to path, or to `out` when path is empty.
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << text) || !f.flush()) throw IoError("cannot write " + path);
}

inline ExperimentConfig resolve_config(const CliOptions& o) {
  if (!o.config) throw ConfigError("--config is required");
  ExperimentConfig e = experiment_config(Config::load(*o.config));
  if (o.seed) e.seed = *o.seed;
  if (o.threads) {
    if (*o.threads < 1) throw ConfigError("--threads must be >= 1");
    e.threads = *o.threads;
  }
  if (o.out) e.out = *o.out;
  if (o.format) {
    if (*o.format != "csv" && *o.format != "json") throw ConfigError("--format must be csv or json");
    e.format = *o.format;
  }
  return e;
}

// The problem at sample size n. Delta-dependent hypotheses are built for
// delta unless problem.design_delta pins them; a delta the construction
// rejects falls back to the default design, whose bounds then report n/a.
inline ProblemInstance build_problem(const ExperimentConfig& e, int n, double delta) {
  ProblemParams pp = e.params;
  pp.values["n"] = std::to_string(n);
  if (pp.has("design_delta")) return make_problem(e.problem, pp);
  ProblemParams at_delta = pp;
  at_delta.values["design_delta"] = format_double(delta);
  try {
    return make_problem(e.problem, at_delta);
  } catch (const std::invalid_argument&) {
    return make_problem(e.problem, pp);
  }
}

// One row per (n, delta, simulated hypothesis), in that order.
inline std::vector<ResultRow> simulate_rows(const ExperimentConfig& e) {
  std::vector<ResultRow> rows;
  for (int n : e.ns)
    for (double delta : e.deltas) {
      const ProblemInstance p = build_problem(e, n, delta);
      const EstimatorSpec spec = e.estimator.value_or(p.default_estimator);
      if (!p.supports(spec.kind))
        throw ConfigError("problem " + p.name + " does not support estimator " + spec.name());
      auto lb = p.lb_for(spec.kind, delta);
      auto ub = p.ub_for(spec.kind, delta);
      if (lb) *lb *= e.lb_scale;
      if (ub) *ub *= e.ub_scale;
      for (const auto& res : run_experiment(p, spec, e.reps, {delta}, e.seed, e.threads)) {
        const auto& q = res.quantiles.front();
        ResultRow r;
        r.problem = p.name;
        r.n = n;
        r.d = p.d;
        r.delta = delta;
        r.estimator = spec.name();
        r.lb = lb;
        r.emp_q_lo = q.dkw_lo;
        r.emp_q = q.value;
        r.emp_q_hi = q.dkw_hi;
        r.ub = ub;
        r.reps = e.reps;
        r.seed = e.seed;
        rows.push_back(r);
      }
    }
  return rows;
}

inline int cmd_simulate(const CliOptions& o, std::ostream& out) {
  const ExperimentConfig e = resolve_config(o);
  std::ostringstream text;
  write_rows(text, simulate_rows(e), e.format);
  emit(e.out, text.str(), out);
  return kExitOk;
}

// One PASS/FAIL line per row plus a summary; 1 when any row fails.
inline int verify_rows(const std::vector<ResultRow>& rows, std::ostream& os) {
  std::size_t passed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const auto v = r.verdict();
    passed += v.pass;
    os << (v.pass ? "PASS" : "FAIL") << " row " << i + 1 << " problem=" << r.problem << " n=" << r.n
       << " delta=" << format_double(r.delta) << " estimator=" << r.estimator
       << " lower_margin=" << format_optional(v.lower_margin) << " upper_margin=" << format_optional(v.upper_margin)
       << '\n';
  }
  os << "verify: " << passed << "/" << rows.size() << " rows PASS\n";
  return passed == rows.size() ? kExitOk : kExitFail;
}

inline int cmd_verify(const CliOptions& o, std::ostream& out) {
  std::vector<ResultRow> rows;
  std::string path = o.out.value_or("");
  if (o.results) {
    rows = load_results(*o.results);
  } else {
    const ExperimentConfig e = resolve_config(o);
    rows = simulate_rows(e);
  }
  std::ostringstream text;
  const int code = verify_rows(rows, text);
  emit(path, text.str(), out);
  return code;
}

inline int cmd_bound(const CliOptions& o, std::ostream& out) {
  const ExperimentConfig e = resolve_config(o);
  std::vector<nlohmann::ordered_json> json_rows;
  std::ostringstream text;
  if (e.format == "csv")
    text << "problem,n,d,delta,lb,certified_lb,ub,ub_certified,lb_valid,ub_valid,lb_estimators,ub_estimators,notes\n";
  for (int n : e.ns)
    for (double delta : e.deltas) {
      const ProblemInstance p = build_problem(e, n, delta);
      auto lb = p.lb(delta), ub = p.ub(delta);
      if (lb) *lb *= e.lb_scale;
      if (ub) *ub *= e.ub_scale;
      const auto cert = p.lb_range.contains(delta) ? p.certified_lb(delta) : std::nullopt;
      const std::string lb_est = join_kinds(p.lb_estimators, "all"), ub_est = join_kinds(p.ub_estimators, "none");
      if (e.format == "csv") {
        text << p.name << ',' << n << ',' << p.d << ',' << format_double(delta) << ',' << format_optional(lb) << ','
             << format_optional(cert) << ',' << format_optional(ub) << ',' << (p.ub_certified ? "yes" : "no") << ','
             << csv_field(format_range(p.lb_range)) << ',' << csv_field(format_range(p.ub_range)) << ',' << lb_est
             << ',' << ub_est << ',' << csv_field(p.notes) << '\n';
      } else {
        json_rows.push_back({{"problem", p.name},
                             {"n", n},
                             {"d", p.d},
                             {"delta", delta},
                             {"lb", optional_json(lb)},
                             {"certified_lb", optional_json(cert)},
                             {"ub", optional_json(ub)},
                             {"ub_certified", p.ub_certified},
                             {"lb_valid", format_range(p.lb_range)},
                             {"ub_valid", format_range(p.ub_range)},
                             {"lb_estimators", lb_est},
                             {"ub_estimators", ub_est},
                             {"notes", p.notes}});
      }
    }
  if (e.format == "json") text << nlohmann::ordered_json(json_rows).dump(2) << '\n';
  emit(e.out, text.str(), out);
  return kExitOk;
}

inline int cmd_pack(const CliOptions& o, std::ostream& out) {
  std::optional<Config> c;
  if (o.config) c = Config::load(*o.config);
  auto pick = [&](const std::optional<int>& flag, const std::string& key) {
    if (flag) return *flag;
    if (!c || !c->get(key)) throw ConfigError("pack needs --" + key.substr(5) + " or " + key + " in the config");
    const double v = c->num(key, 0.0);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key + " must be an integer");
    return static_cast<int>(v);
  };
  const int d = pick(o.d, "pack.d"), s = pick(o.s, "pack.s");
  if (d < 1 || s < 1 || s > d) throw ConfigError("pack needs 1 <= s <= d");
  std::size_t max_words = o.max_words.value_or(0);
  if (!o.max_words && c && c->get("pack.max_words")) max_words = static_cast<std::size_t>(c->num("pack.max_words", 0.0));
  const SparsePacking P = gv_sparse_packing(d, s, max_words);
  std::ostringstream text;
  const double bound = gv_sparse_log_bound(d, s);
  text << "# d=" << d << " s=" << s << " M=" << P.packing.size()
       << " min_distance>" << format_double(P.packing.min_distance) << '\n'
       << "# log M bound (3s/4)log(d/(4s)) = " << format_double(bound) << " (M >= "
       << format_double(std::exp(bound)) << ")\n";
  for (const auto& w : P.packing.words) text << to_string(w) << '\n';
  emit(o.out.value_or(""), text.str(), out);
  return kExitOk;
}

// Per (problem, estimator, delta): row and pass counts, and the log-log
// slope of the worst empirical quantile at each n when three or more n.
inline int cmd_report(const CliOptions& o, std::ostream& out) {
  std::vector<ResultRow> rows;
  std::string format = o.format.value_or("csv");
  if (o.results) {
    rows = load_results(*o.results);
  } else {
    const ExperimentConfig e = resolve_config(o);
    if (!o.format) format = e.format;
    rows = simulate_rows(e);
  }
  if (format != "csv" && format != "json") throw ConfigError("--format must be csv or json");
  struct Group {
    std::size_t rows = 0, pass = 0;
    std::map<int, double> worst;
  };
  std::map<std::tuple<std::string, std::string, double>, Group> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.problem, r.estimator, r.delta}];
    ++g.rows;
    g.pass += r.verdict().pass;
    auto [it, fresh] = g.worst.emplace(r.n, r.emp_q);
    if (!fresh) it->second = std::max(it->second, r.emp_q);
  }
  std::ostringstream text;
  auto arr = nlohmann::ordered_json::array();
  if (format == "csv") text << "problem,estimator,delta,rows,pass,n_min,n_max,slope\n";
  for (const auto& [key, g] : groups) {
    std::optional<double> slope;
    std::vector<std::pair<double, double>> pts;
    bool positive = true;
    for (const auto& [n, q] : g.worst) {
      pts.emplace_back(n, q);
      positive = positive && q > 0.0;
    }
    if (pts.size() >= 3 && positive) slope = rate_fit(pts);
    const auto& [problem, est, delta] = key;
    const int n_min = g.worst.begin()->first, n_max = g.worst.rbegin()->first;
    if (format == "csv") {
      text << problem << ',' << est << ',' << format_double(delta) << ',' << g.rows << ',' << g.pass << ',' << n_min
           << ',' << n_max << ',' << format_optional(slope) << '\n';
    } else {
      arr.push_back({{"problem", problem},
                     {"estimator", est},
                     {"delta", delta},
                     {"rows", g.rows},
                     {"pass", g.pass},
                     {"n_min", n_min},
                     {"n_max", n_max},
                     {"slope", optional_json(slope)}});
    }
  }
  if (format == "json") text << arr.dump(2) << '\n';
  emit(o.out.value_or(""), text.str(), out);
  return kExitOk;
}

}  // namespace minimaxq
