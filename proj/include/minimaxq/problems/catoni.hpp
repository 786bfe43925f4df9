#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/problems/gaussian.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// Mean-zero, variance sigma^2 law with a rare heavy atom:
// sigma sqrt((1-p)/p) with probability p = 2 delta / n, else -sigma sqrt(p/(1-p)).
struct CatoniLaw {
  double sigma = 1.0, p = 0.0;

  double heavy() const { return sigma * std::sqrt((1.0 - p) / p); }
  double light() const { return -sigma * std::sqrt(p / (1.0 - p)); }
  DiscreteDist dist() const { return DiscreteDist({light(), heavy()}, {1.0 - p, p}); }
  double draw(Rng& rng) const { return uniform01(rng) < p ? heavy() : light(); }
};

inline CatoniLaw catoni_law(int n, double sigma, double delta) { return {sigma, 2.0 * delta / n}; }

// Largest delta at which one heavy atom provably pushes the squared error of
// the sample mean past sigma^2/(e n delta): (1 - 2 delta)^2 >= 2/e.
inline double catoni_delta_max() { return (1.0 - std::sqrt(2.0 / std::exp(1.0))) / 2.0; }

// Scalar mean estimation under squared loss. With m >= 1 heavy atoms the
// sample mean errs by at least sigma^2 (1 - 2 delta)^2 / (2 n delta (1 - p)),
// and P(m >= 1) >= 1 - e^{-2 delta} > delta.
inline ProblemInstance catoni_adversary(int n, double sigma, double design_delta = 0.01) {
  require(n >= 1 && sigma > 0.0, "catoni_adversary: need n >= 1, sigma > 0");
  require(design_delta > 0.0 && design_delta <= std::exp(-1.0), "catoni_adversary: design delta outside (0, 1/e]");
  const double nn = n, s2 = sigma * sigma;
  const CatoniLaw law = catoni_law(n, sigma, design_delta);

  ProblemInstance p;
  p.name = "catoni_adversary";
  p.n = n;
  p.d = 1;
  p.design_delta = design_delta;
  p.loss = LossModel(Metric::scalar_abs, Transform::square());
  p.hypotheses = {{scalar_vector(0.0), "heavy-atom law, mean 0", true}};

  p.lb_range = {catoni_delta_max(), true};
  p.lb_formula = [=](double delta) { return s2 / (std::exp(1.0) * nn * delta); };
  p.certificates = [](double) { return std::vector<BoundCertificate>{}; };
  p.lb_estimators = {EstimatorKind::sample_mean};

  p.ub_range = {1.0, false};
  p.ub_formula = [=](double delta) -> std::optional<double> { return 100.0 * s2 * std::log(1.0 / delta) / nn; };
  p.ub_certified = false;
  p.ub_estimators = {EstimatorKind::median_of_means};

  p.sampler = [=](std::size_t, Rng& rng) {
    Dataset X(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = law.draw(rng);
    return X;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) { return mean_estimate(spec, data, design_delta); };
  p.default_estimator = {EstimatorKind::sample_mean, {}};
  p.estimators = {EstimatorKind::sample_mean, EstimatorKind::median_of_means};
  p.notes = "the lower bound speaks about the sample mean only; the law is built at the design delta";
  return p;
}

}  // namespace minimaxq
