#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "minimaxq/core.hpp"

namespace minimaxq {

// Stochastic subgradient at x for step t.
using SubgradientOracle = std::function<Vector(const Vector& x, int t)>;

struct SgdResult {
  Vector average;
  Vector last;
  double max_norm = 0.0;  // largest iterate norm seen, for the ball invariant
};

inline Vector project_ball(const Vector& x, double R) {
  const double nx = x.norm();
  return nx > R ? Vector(x * (R / nx)) : x;
}

inline Vector clip_norm(const Vector& g, double tau) {
  const double ng = g.norm();
  return ng > tau ? Vector(g * (tau / ng)) : g;
}

// x_{t+1} = proj(x_t - step * clip(g_t, tau)); returns the average of x_0..x_{T-1}.
inline SgdResult clipped_sgd(const SubgradientOracle& oracle, const Vector& x0, int T, double R, double step,
                             double tau) {
  require(T >= 1, "clipped_sgd: T must be >= 1");
  require(R > 0.0 && step > 0.0 && tau > 0.0, "clipped_sgd: R, step and tau must be positive");
  SgdResult res;
  Vector x = project_ball(x0, R);
  res.average = Vector::Zero(x.size());
  for (int t = 0; t < T; ++t) {
    res.average += x;
    res.max_norm = std::max(res.max_norm, x.norm());
    x = project_ball(x - step * clip_norm(oracle(x, t), tau), R);
  }
  res.max_norm = std::max(res.max_norm, x.norm());
  res.average /= static_cast<double>(T);
  res.last = x;
  return res;
}

struct SgdSchedule {
  double step, tau;
};

// step = R/(gamma sqrt(T)), tau = gamma sqrt(T/log(1/delta)) floored at gamma.
inline SgdSchedule default_sgd_schedule(int T, double gamma, double R, double delta) {
  require(T >= 1 && gamma > 0.0 && R > 0.0, "default_sgd_schedule: bad input");
  require(delta > 0.0 && delta < 1.0, "default_sgd_schedule: delta outside (0,1)");
  const double t = static_cast<double>(T);
  return {R / (gamma * std::sqrt(t)), std::max(gamma, gamma * std::sqrt(t / std::log(1.0 / delta)))};
}

}  // namespace minimaxq
