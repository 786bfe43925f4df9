#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators/basic.hpp"
#include "minimaxq/packing.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

namespace detail {

inline Matrix embed_block(const Matrix& block, int d) {
  Matrix S = Matrix::Zero(d, d);
  S.topLeftCorner(block.rows(), block.cols()) = block;
  return S;
}

// Two-point pair: diag(a^2 sigma^2, sigma^2 I_{r0-1}) against sigma^2 I_{r0},
// built at max(delta, e^{-n}/3) since smaller levels inherit the bound.
struct CovTwoPoint {
  double level = 0.0, a = 1.0;
  Matrix S1, S2;  // r0 x r0 blocks
};

inline CovTwoPoint cov_two_point(int n, int r0, double sigma, double delta) {
  CovTwoPoint tp;
  tp.level = std::max(delta, std::exp(-static_cast<double>(n)) / 3.0);
  tp.a = 1.0 - std::sqrt(two_point_budget(tp.level) / (4.0 * n));
  tp.S2 = sigma * sigma * Matrix::Identity(r0, r0);
  tp.S1 = tp.S2;
  tp.S1(0, 0) = tp.a * tp.a * sigma * sigma;
  return tp;
}

// Gilbert-Varshamov family sigma^2/2 I + b phi phi^T on the leading r0 block.
inline std::vector<Matrix> cov_packing_family(int n, int r0, double sigma) {
  const auto P = gv_cube_packing(r0, static_cast<std::size_t>(std::ceil(std::exp(r0 / 8.0))));
  const double b = sigma * sigma / (6.0 * std::sqrt(static_cast<double>(n) * r0));
  std::vector<Matrix> out;
  for (const auto& w : P.words) {
    Vector phi(r0);
    for (int i = 0; i < r0; ++i) phi[i] = w[static_cast<std::size_t>(i)];
    out.push_back(0.5 * sigma * sigma * Matrix::Identity(r0, r0) + b * phi * phi.transpose());
  }
  return out;
}

}  // namespace detail

// Zero-mean Gaussian covariance estimation in operator norm over
// {||Sigma||_op <= sigma^2, effective rank <= r}. Parameters are flattened
// d x d matrices.
inline ProblemInstance covariance_opnorm(int n, int d, double sigma, double r, double design_delta = 0.05) {
  require(n >= 1 && d >= 1 && sigma > 0.0, "covariance_opnorm: need n, d >= 1 and sigma > 0");
  require(r >= 1.0 && r <= std::min(n, d), "covariance_opnorm: r must lie in [1, min(n, d)]");
  require(design_delta > 0.0 && design_delta < 0.5, "covariance_opnorm: design delta outside (0,1/2)");
  const int r0 = static_cast<int>(std::floor(r));
  const double nn = n, s2 = sigma * sigma;
  LossModel loss(Metric::operator_norm, Transform::identity());

  ProblemInstance p;
  p.name = "covariance_opnorm";
  p.n = n;
  p.d = d;
  p.design_delta = design_delta;
  p.loss = loss;

  const auto tp = detail::cov_two_point(n, r0, sigma, design_delta);
  p.hypotheses = {{flatten(detail::embed_block(tp.S1, d)), "two-point Sigma_1 (a-scaled)", true},
                  {flatten(detail::embed_block(tp.S2, d)), "two-point Sigma_2 = sigma^2 I_r0", true}};
  auto family = std::make_shared<std::vector<Matrix>>();
  if (r0 >= 20) {
    *family = detail::cov_packing_family(n, r0, sigma);
    for (std::size_t i = 0; i < family->size(); ++i)
      p.hypotheses.push_back({flatten(detail::embed_block((*family)[i], d)), "GV word " + std::to_string(i), false});
  }

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    const double two_point_piece = (s2 / 9.0) * std::min(std::sqrt(std::log(1.0 / delta) / nn), 1.0);
    const double packing_piece = r0 >= 20 ? s2 * std::sqrt(r / nn) / 800.0 : 0.0;
    return std::max(two_point_piece, packing_piece);
  };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const auto t = detail::cov_two_point(n, r0, sigma, delta);
    const Vector z = Vector::Zero(r0);
    // the remaining d - r0 coordinates are identically zero under both laws
    const double kl = tensorize_kl(kl_gaussian(GaussianDist(z, t.S1), GaussianDist(z, t.S2)), n);
    if (auto c = two_point_certificate(kl, flatten(t.S1), flatten(t.S2), loss, t.level)) {
      c->delta_max = t.level;
      out.push_back(*c);
    }
    if (!family->empty()) {
      const GaussianDist Q(z, 0.5 * s2 * Matrix::Identity(r0, r0));
      std::vector<double> kls;
      for (const auto& S : *family) kls.push_back(tensorize_kl(kl_gaussian(GaussianDist(z, S), Q), n));
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < family->size(); ++i)
        for (std::size_t j = i + 1; j < family->size(); ++j)
          sep = std::min(sep, loss.distance(flatten((*family)[i]), flatten((*family)[j])));
      if (auto c = fano_quantile_lb(kls, sep / 2.0, loss.g())) out.push_back(*c);
    }
    return out;
  };

  // Certified concentration bound for the sample covariance, where it applies.
  p.ub_range = {1.0, true};
  p.ub_formula = [=](double delta) { return matrix_bernstein_cov_bound(s2, r, n, d, delta); };
  p.ub_certified = true;
  p.ub_estimators = {EstimatorKind::sample_cov};

  auto covs = std::make_shared<std::vector<GaussianDist>>();
  for (const auto& h : p.hypotheses) covs->emplace_back(Vector::Zero(d), unflatten(h.theta));
  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset X(n, d);
    (*covs)[h].sample_rows(rng, X);
    return X;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) {
    return flatten(spec.kind == EstimatorKind::sample_cov ? sample_covariance(data) : zero_covariance(d));
  };
  p.default_estimator = {EstimatorKind::sample_cov, {}};
  p.estimators = {EstimatorKind::sample_cov, EstimatorKind::zero_cov};
  p.notes = "operator-norm loss; ub is the 513 matrix concentration bound when its condition holds";
  return p;
}

}  // namespace minimaxq
