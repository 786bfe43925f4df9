#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators/sgd.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// x log((1 + x)/(1 - x)) = KL(Ber((1+x)/2), Ber((1-x)/2)), increasing on [0,1).
inline double sco_kl_link(double x) { return x * std::log((1.0 + x) / (1.0 - x)); }

inline double sco_kl_link_inverse(double w) {
  require(w >= 0.0, "sco_kl_link_inverse: negative argument");
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (sco_kl_link(mid) < w ? lo : hi) = mid;
  }
  return lo;
}

// f(x, y) = gamma |x + y R| with Y in {-1, 1}, P(Y = 1) = p.
struct ScoObjective {
  double gamma = 1.0, R = 1.0;

  double value(double x, double y) const { return gamma * std::abs(x + y * R); }
  // minimal-norm subgradient in x
  double subgradient(double x, double y) const {
    const double z = x + y * R;
    return z > 0.0 ? gamma : (z < 0.0 ? -gamma : 0.0);
  }
  double expected(double x, double p) const { return p * value(x, 1.0) + (1.0 - p) * value(x, -1.0); }
  // minimum over [-R, R]: the median of -Y R
  double minimum(double p) const { return std::min(expected(-R, p), expected(R, p)); }
  double gap(double x, double p) const { return expected(x, p) - minimum(p); }
};

inline double sco_s(int T, double delta) { return sco_kl_link_inverse(two_point_budget(delta) / (2.0 * T)); }

// Hard one-dimensional instance: P_1 = Ber((1+s)/2), P_2 = Ber((1-s)/2) on
// {-1, 1}, optimality-gap loss. Parameters are the minimizers -R and R.
inline ProblemInstance sco_hard_instance(int T, double gamma, double R, double design_delta = 0.05) {
  require(T >= 1 && gamma > 0.0 && R > 0.0, "sco_hard_instance: need T >= 1, gamma > 0, R > 0");
  require(design_delta > 0.0 && design_delta < 0.5, "sco_hard_instance: design delta outside (0,1/2)");
  const double TT = T;
  const ScoObjective f{gamma, R};
  const double s = sco_s(T, design_delta);
  const std::vector<double> p_one = {(1.0 + s) / 2.0, (1.0 - s) / 2.0};

  ProblemInstance p;
  p.name = "sco_hard_instance";
  p.n = T;
  p.d = 1;
  p.design_delta = design_delta;
  p.hypotheses = {{scalar_vector(-R), "P1 = Ber((1+s)/2)", true}, {scalar_vector(R), "P2 = Ber((1-s)/2)", true}};

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) { return gamma * R / std::sqrt(30.0) * std::min(std::sqrt(std::log(1.0 / delta) / TT), 1.0); };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const double sd = sco_s(T, delta);
    const DiscreteDist P1({-1.0, 1.0}, {(1.0 - sd) / 2.0, (1.0 + sd) / 2.0});
    const DiscreteDist P2({-1.0, 1.0}, {(1.0 + sd) / 2.0, (1.0 - sd) / 2.0});
    const double tv = bretagnolle_huber_tv_bound(tensorize_kl(kl_discrete(P1, P2), T));
    // separation: F_{P1}(0) - min F_{P1}
    if (auto c = le_cam_quantile_lb(tv, f.gap(0.0, (1.0 + sd) / 2.0), Transform::identity(), delta)) out.push_back(*c);
    return out;
  };

  p.ub_range = {1.0, false};
  p.ub_formula = [=](double delta) -> std::optional<double> { return 20.0 * gamma * R * std::sqrt(std::log(1.0 / delta) / TT); };
  p.ub_certified = false;
  p.ub_estimators = {EstimatorKind::clipped_sgd};

  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset Y(T, 1);
    for (int t = 0; t < T; ++t) Y(t, 0) = uniform01(rng) < p_one[h] ? 1.0 : -1.0;
    return Y;
  };
  // row t of the data is the observation used at step t
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) {
    const int steps = static_cast<int>(data.rows());
    const auto sched = default_sgd_schedule(steps, gamma, R, design_delta);
    const double step = spec.get("step", sched.step), tau = spec.get("tau", sched.tau);
    SubgradientOracle oracle = [&](const Vector& x, int t) { return scalar_vector(f.subgradient(x[0], data(t, 0))); };
    return clipped_sgd(oracle, Vector::Zero(1), steps, R, step, tau).average;
  };
  p.evaluator = [=](const Vector& x, std::size_t h) { return f.gap(x[0], p_one[h]); };
  p.default_estimator = {EstimatorKind::clipped_sgd, {}};
  p.estimators = {EstimatorKind::clipped_sgd};
  p.notes = "optimality gap of f(x,y) = gamma |x + yR|; s solves s log((1+s)/(1-s)) = log(1/(4 delta(1-delta)))/(2T)";
  return p;
}

}  // namespace minimaxq
