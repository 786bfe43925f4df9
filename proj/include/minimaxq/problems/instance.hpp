#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "minimaxq/bounds.hpp"
#include "minimaxq/core.hpp"
#include "minimaxq/estimators/spec.hpp"
#include "minimaxq/loss.hpp"

namespace minimaxq {

struct Hypothesis {
  Vector theta;
  std::string label;
  // Default Monte Carlo runs skip hypotheses that only feed a certificate.
  bool simulate = true;
};

// delta in (0, max), or (0, max] when inclusive.
struct DeltaRange {
  double max = 0.25;
  bool inclusive = true;

  bool contains(double delta) const { return delta > 0.0 && (inclusive ? delta <= max : delta < max); }
};

struct ProblemInstance {
  std::string name;
  int n = 0;
  int d = 0;
  // delta at which the delta-dependent hypotheses were built
  double design_delta = 0.05;
  std::vector<Hypothesis> hypotheses;
  std::optional<LossModel> loss;

  DeltaRange lb_range;
  std::function<double(double)> lb_formula;
  // Engine certificates for the stored constructions; lb_formula is never
  // larger than the best valid one.
  std::function<std::vector<BoundCertificate>(double)> certificates;
  // Estimators the lower bound speaks about; empty means all of them.
  std::vector<EstimatorKind> lb_estimators;

  DeltaRange ub_range{1.0, false};
  // Empty when there is no upper bound; nullopt where its condition fails.
  std::function<std::optional<double>(double)> ub_formula;
  bool ub_certified = false;
  // Estimators whose quantile the upper bound controls.
  std::vector<EstimatorKind> ub_estimators;

  std::function<Dataset(std::size_t, Rng&)> sampler;
  std::function<Vector(const EstimatorSpec&, const Dataset&)> estimator;
  // Loss of an estimate under hypothesis h; defaults to loss(estimate, theta_h).
  std::function<double(const Vector&, std::size_t)> evaluator;

  EstimatorSpec default_estimator;
  std::vector<EstimatorKind> estimators;
  std::string notes;

  bool supports(EstimatorKind k) const { return std::find(estimators.begin(), estimators.end(), k) != estimators.end(); }

  std::optional<double> lb(double delta) const {
    if (!lb_formula || !lb_range.contains(delta)) return std::nullopt;
    return lb_formula(delta);
  }

  std::optional<double> ub(double delta) const {
    if (!ub_formula || !ub_range.contains(delta)) return std::nullopt;
    return ub_formula(delta);
  }

  std::optional<double> lb_for(EstimatorKind k, double delta) const {
    if (!lb_estimators.empty() && std::find(lb_estimators.begin(), lb_estimators.end(), k) == lb_estimators.end())
      return std::nullopt;
    return lb(delta);
  }

  std::optional<double> ub_for(EstimatorKind k, double delta) const {
    if (std::find(ub_estimators.begin(), ub_estimators.end(), k) == ub_estimators.end()) return std::nullopt;
    return ub(delta);
  }

  // Largest engine certificate valid at delta.
  std::optional<double> certified_lb(double delta) const {
    if (!certificates) return std::nullopt;
    std::optional<double> best;
    for (const auto& c : certificates(delta))
      if (c.valid_at(delta)) best = std::max(best.value_or(0.0), c.value);
    return best;
  }

  Vector estimate(const EstimatorSpec& spec, const Dataset& data) const {
    require(supports(spec.kind), "problem " + name + " does not support estimator " + spec.name());
    return estimator(spec, data);
  }

  double evaluate(const Vector& est, std::size_t h) const {
    require(h < hypotheses.size(), "evaluate: hypothesis index out of range");
    if (evaluator) return evaluator(est, h);
    return (*loss)(est, hypotheses[h].theta);
  }

  Dataset sample(std::size_t h, Rng& rng) const {
    require(h < hypotheses.size(), "sample: hypothesis index out of range");
    return sampler(h, rng);
  }

  std::vector<std::size_t> simulated_hypotheses() const {
    std::vector<std::size_t> out;
    for (std::size_t h = 0; h < hypotheses.size(); ++h)
      if (hypotheses[h].simulate) out.push_back(h);
    return out;
  }
};

// Two-point certificate: separation half the loss distance between the
// parameters, KL over the whole sample.
inline std::optional<BoundCertificate> two_point_certificate(double kl_total, const Vector& theta1,
                                                             const Vector& theta2, const LossModel& loss,
                                                             double delta) {
  return le_cam_kl_quantile_lb(kl_total, loss.distance(theta1, theta2) / 2.0, loss.g(), delta);
}

// log(1/(4 delta (1 - delta))), the KL budget of the two-point constructions.
inline double two_point_budget(double delta) { return le_cam_kl_threshold(delta); }

inline Vector scalar_vector(double x) { return Vector::Constant(1, x); }

}  // namespace minimaxq
