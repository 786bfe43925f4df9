#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "minimaxq/problems/catoni.hpp"
#include "minimaxq/problems/covariance.hpp"
#include "minimaxq/problems/density.hpp"
#include "minimaxq/problems/gaussian.hpp"
#include "minimaxq/problems/isotonic.hpp"
#include "minimaxq/problems/sco.hpp"
#include "minimaxq/problems/sparse.hpp"

namespace minimaxq {

// Named problem parameters as read from a config (values kept as text).
struct ProblemParams {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) > 0; }

  double num(const std::string& key, double fallback) const {
    auto it = values.find(key);
    if (it == values.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    require(used > 0 && used == it->second.size(), "parameter " + key + " is not a number: " + it->second);
    return v;
  }

  int integer(const std::string& key, int fallback) const {
    const double v = num(key, fallback);
    require(v == std::floor(v) && std::abs(v) < 2e9, "parameter " + key + " is not an integer");
    return static_cast<int>(v);
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  }
};

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"gaussian_mean_sq", "robust_mean_huber", "gaussian_mean_linf",
                                                 "covariance_opnorm", "sparse_regression", "density_point",
                                                 "isotonic", "sco_hard_instance", "catoni_adversary"};
  return names;
}

// Covariance for the mean problems: "linear" is diag(1, ..., d), "identity" is I_d.
inline Matrix mean_covariance(int d, const std::string& spectrum, double scale) {
  require(d >= 1, "covariance spectrum: d must be >= 1");
  Vector diag(d);
  if (spectrum == "linear") {
    for (int j = 0; j < d; ++j) diag[j] = j + 1.0;
  } else if (spectrum == "identity") {
    diag.setOnes();
  } else {
    throw std::invalid_argument("unknown spectrum: " + spectrum + " (expected linear or identity)");
  }
  return Matrix((scale * diag).asDiagonal());
}

// Builds a problem from its name and parameters; "n" doubles as T for the
// SCO instance. Unknown names raise invalid_argument.
inline ProblemInstance make_problem(const std::string& name, const ProblemParams& pp) {
  const double dd = pp.num("design_delta", 0.05);
  const int n = pp.integer("n", 100);
  if (name == "gaussian_mean_sq" || name == "robust_mean_huber") {
    const Matrix Sigma = mean_covariance(pp.integer("d", 5), pp.str("spectrum", "linear"), pp.num("sigma2", 1.0));
    if (name == "gaussian_mean_sq") return gaussian_mean_sq(n, Sigma, dd);
    return robust_mean_huber(n, Sigma, pp.num("eps", 0.1), dd);
  }
  if (name == "gaussian_mean_linf") return gaussian_mean_linf(n, pp.integer("d", 50), pp.num("sigma", 1.0), dd);
  if (name == "covariance_opnorm")
    return covariance_opnorm(n, pp.integer("d", 30), pp.num("sigma", 1.0), pp.num("r", 10.0), dd);
  if (name == "sparse_regression") {
    Rng rng = make_stream(static_cast<std::uint64_t>(pp.num("design_seed", 7.0)), 0, 0);
    const Matrix X = gaussian_design(n, pp.integer("d", 100), rng);
    return sparse_regression(X, pp.num("sigma", 1.0), pp.integer("s", 5), {pp.num("c", 0.5), pp.num("C", 2.0)}, dd);
  }
  if (name == "density_point") return density_point(n, pp.num("beta", 1.0), pp.num("gamma", 1.0), dd);
  if (name == "isotonic") return isotonic(n, dd, {}, pp.num("fitted_constant", kIsotonicFittedConstant));
  if (name == "sco_hard_instance") return sco_hard_instance(n, pp.num("gamma", 1.0), pp.num("R", 1.0), dd);
  if (name == "catoni_adversary") return catoni_adversary(n, pp.num("sigma", 1.0), pp.num("design_delta", 0.01));
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace minimaxq
