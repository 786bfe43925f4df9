#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators/basic.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// Risk lower bound Delta = delta_coef * n^{-2/3} and diameter range
// [d_lo_coef, d_hi_coef] * n^{1/6} of the finite monotone family behind the
// n^{-2/3} term. The family itself is not built here.
struct IsotonicConstruction {
  double delta_coef = 1.0 / (512.0 * std::cbrt(3.0));
  double d_lo_coef = 1.0 / (8.0 * std::pow(3.0, 1.0 / 6.0));
  double d_hi_coef = 1.0;
  double epsilon = 1.0 / 64.0;
  double delta_minus = 1.0 / 1000.0;
};

// Pilot fit: worst ratio of the clipped-PAVA quantile to n^{-2/3} + log(1/delta)/n
// over n in {100, 1000}, delta in {0.25, 0.1, 0.05, 0.01} and the simulated
// hypotheses (5000 reps, seed 20240601; worst ratio 1.10), rounded up with a
// 25% margin. Not a certified constant.
inline constexpr double kIsotonicFittedConstant = 1.4;

namespace detail {

inline std::optional<BoundCertificate> isotonic_boosted_certificate(int n, const IsotonicConstruction& ic) {
  const double d_hi = 0.25;
  const int k = boost_find_k(ic.delta_minus, d_hi);
  const double np = static_cast<double>(boost_product_power(k)) * n;
  const auto g = Transform::square(1.0 / np);
  const double root6 = std::pow(np, 1.0 / 6.0);
  auto base = risk_to_quantile_range(ic.delta_coef * std::pow(np, -2.0 / 3.0), ic.d_lo_coef * root6,
                                     ic.d_hi_coef * root6, g, ic.epsilon);
  if (!base || !base->valid_at(ic.delta_minus)) return std::nullopt;
  return boost_certificate(*base, ic.delta_minus, d_hi, 2.0);
}

}  // namespace detail

// Monotone sequence in [0,1]^n observed with N(0,1) noise, loss n^-1 ||.||^2.
inline ProblemInstance isotonic(int n, double design_delta = 0.05, IsotonicConstruction ic = {},
                                double fitted_constant = kIsotonicFittedConstant) {
  require(n >= 2, "isotonic: n must be >= 2");
  require(design_delta > 0.0 && design_delta < 0.5, "isotonic: design delta outside (0,1/2)");
  const double nn = n;
  LossModel loss(Metric::euclidean, Transform::square(1.0 / nn));
  auto two_point = [=](double delta) {
    const double level = std::max(delta, std::exp(-nn) / 3.0);
    return std::make_pair(level, Vector(Vector::Constant(n, std::sqrt(two_point_budget(level) / nn))));
  };

  ProblemInstance p;
  p.name = "isotonic";
  p.n = n;
  p.d = n;
  p.design_delta = design_delta;
  p.loss = loss;
  Vector ramp(n);
  for (int i = 0; i < n; ++i) ramp[i] = (i + 1.0) / nn;
  p.hypotheses = {{Vector::Zero(n), "two-point theta = 0", true},
                  {two_point(design_delta).second, "two-point constant", true},
                  {ramp, "ramp i/n", true}};

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    const double delta_piece = std::min(std::log(1.0 / delta) / nn, 1.0) / 20.0;
    const double rate_piece = std::pow(nn, -2.0 / 3.0) / (std::pow(2.0, 26) * 27.0);
    return std::max(delta_piece, rate_piece);
  };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const auto [level, t] = two_point(delta);
    const Matrix one = Matrix::Identity(1, 1);
    const double kl = tensorize_kl(kl_gaussian(GaussianDist(Vector::Zero(1), one), GaussianDist(t.head(1), one)), n);
    if (auto c = two_point_certificate(kl, Vector::Zero(n), t, loss, level)) {
      c->delta_max = level;
      out.push_back(*c);
    }
    if (auto c = detail::isotonic_boosted_certificate(n, ic)) out.push_back(*c);
    return out;
  };

  p.ub_range = {1.0, true};
  p.ub_formula = [=](double delta) -> std::optional<double> {
    return std::min(fitted_constant * (std::pow(nn, -2.0 / 3.0) + std::log(1.0 / delta) / nn), 1.0);
  };
  p.ub_certified = false;
  p.ub_estimators = {EstimatorKind::isotonic_clipped};

  auto thetas = std::make_shared<std::vector<Vector>>();
  for (const auto& h : p.hypotheses) thetas->push_back(h.theta);
  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset y = (*thetas)[h];
    for (int i = 0; i < n; ++i) y(i, 0) += standard_normal(rng);
    return y;
  };
  p.estimator = [](const EstimatorSpec&, const Dataset& data) { return isotonic_clipped(data.col(0)); };
  p.default_estimator = {EstimatorKind::isotonic_clipped, {}};
  p.estimators = {EstimatorKind::isotonic_clipped};
  p.notes = "loss n^-1 ||.||^2; the upper bound constant is fitted from a pilot run";
  return p;
}

}  // namespace minimaxq
