#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators/slope.hpp"
#include "minimaxq/packing.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// Design with i.i.d. N(0, 1/2) entries; columns longer than sqrt(n) are
// rescaled onto the sphere of radius sqrt(n).
inline Matrix gaussian_design(int n, int d, Rng& rng) {
  require(n >= 1 && d >= 1, "gaussian_design: need n, d >= 1");
  Matrix X(n, d);
  const double sd = std::sqrt(0.5);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = sd * standard_normal(rng);
  const double cap = std::sqrt(static_cast<double>(n));
  for (int j = 0; j < d; ++j)
    if (X.col(j).norm() > cap) X.col(j) *= cap / X.col(j).norm();
  return X;
}

// Restricted-eigenvalue constants (c, C) the caller vouches for.
struct DesignConstants {
  double c = 0.5, C = 2.0;
};

namespace detail {

// KL between N_n(X t1, sigma^2 I) and N_n(X t2, sigma^2 I), summed row by row.
inline double design_kl(const Matrix& X, const Vector& t1, const Vector& t2, double sigma) {
  const Vector m1 = X * t1, m2 = X * t2;
  const Matrix v = Matrix::Constant(1, 1, sigma * sigma);
  double kl = 0.0;
  for (Eigen::Index i = 0; i < m1.size(); ++i)
    kl += kl_gaussian(GaussianDist(scalar_vector(m1[i]), v), GaussianDist(scalar_vector(m2[i]), v));
  return kl;
}

inline int sparse_packing_level(int d, int s) {
  const int k = std::min(s / 2, static_cast<int>(std::floor(d / (4.0 * std::exp(1.0)))));
  return std::max(1, k);
}

}  // namespace detail

inline ProblemInstance sparse_regression(const Matrix& X, double sigma, int s, DesignConstants dc = {},
                                         double design_delta = 0.05) {
  const int n = static_cast<int>(X.rows()), d = static_cast<int>(X.cols());
  require(n >= 1 && d >= 1 && sigma > 0.0, "sparse_regression: need a nonempty design and sigma > 0");
  require(s >= 1 && s <= d, "sparse_regression: s must lie in [1, d]");
  require(dc.c > 0.0 && dc.C > 0.0, "sparse_regression: design constants must be positive");
  require(design_delta > 0.0 && design_delta < 0.5, "sparse_regression: design delta outside (0,1/2)");
  for (int j = 0; j < d; ++j)
    require(X.col(j).norm() <= std::sqrt(static_cast<double>(n)) * (1.0 + 1e-12),
            "sparse_regression: design column longer than sqrt(n)");
  const double nn = n, dd = d, ss = s, s2 = sigma * sigma;
  const double c2 = dc.c * dc.c, C2 = dc.C * dc.C;
  const double e = std::exp(1.0);
  auto design = std::make_shared<const SlopeDesign>(X);
  LossModel loss(Metric::design_seminorm, Transform::square(), 0.0, std::make_shared<const Matrix>(X));

  ProblemInstance p;
  p.name = "sparse_regression";
  p.n = n;
  p.d = d;
  p.design_delta = design_delta;
  p.loss = loss;

  auto two_point = [=](double delta) {
    Vector t = Vector::Zero(d);
    t[0] = std::sqrt(s2 / nn * two_point_budget(delta));
    return t;
  };
  Vector signal = Vector::Zero(d);
  signal.head(s).setOnes();
  p.hypotheses = {{Vector::Zero(d), "two-point theta_1 = 0", false},
                  {two_point(design_delta), "two-point theta_2", true},
                  {signal, "s-sparse signal of ones", true}};

  // Fano family from the sparse packing, stopped at the guaranteed size.
  auto family = std::make_shared<std::vector<Vector>>();
  if (dd >= 4.0 * e) {
    const int k = detail::sparse_packing_level(d, s);
    const double target = std::exp(gv_sparse_log_bound(d, k));
    const auto P = gv_sparse_packing(d, k, static_cast<std::size_t>(std::ceil(target)));
    const double logM = std::log(static_cast<double>(P.packing.size()));
    const double scale = std::sqrt(s2 * logM / (4.0 * C2 * nn));
    for (std::size_t m = 0; m < P.packing.size(); ++m) {
      family->push_back(scale * P.vector(m));
      p.hypotheses.push_back({family->back(), "packing word " + std::to_string(m), false});
    }
  }

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    const double rate = ss * std::log(e * dd / ss);
    if (dd >= 4.0 * e) return c2 * s2 * std::log(1.0 / delta) / (40.0 * nn) + c2 * s2 * rate / (16384.0 * C2 * nn);
    return c2 * s2 * (rate + std::log(1.0 / delta)) / (200.0 * nn);
  };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const Vector z = Vector::Zero(d), t = two_point(delta);
    if (auto c = two_point_certificate(detail::design_kl(X, z, t, sigma), z, t, loss, delta)) out.push_back(*c);
    if (family->size() >= 2) {
      std::vector<double> kls;
      for (const auto& th : *family) kls.push_back(detail::design_kl(X, th, z, sigma));
      std::vector<Vector> fitted;
      for (const auto& th : *family) fitted.push_back(X * th);
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < fitted.size(); ++i)
        for (std::size_t j = i + 1; j < fitted.size(); ++j) sep = std::min(sep, (fitted[i] - fitted[j]).norm());
      if (auto c = fano_quantile_lb(kls, sep / std::sqrt(nn) / 2.0, loss.g())) out.push_back(*c);
    }
    return out;
  };

  p.ub_range = {1.0, false};
  p.ub_formula = [=](double delta) -> std::optional<double> {
    return 100.0 * (4.0 + std::sqrt(2.0)) * s2 * (ss * std::log(e * dd / ss) / (c2 * nn) + std::log(1.0 / delta) / nn);
  };
  p.ub_certified = false;  // holds under the assumed design constants
  p.ub_estimators = {EstimatorKind::slope};

  auto thetas = std::make_shared<std::vector<Vector>>();
  for (const auto& h : p.hypotheses) thetas->push_back(h.theta);
  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset y = design->X * (*thetas)[h];
    for (int i = 0; i < n; ++i) y(i, 0) += sigma * standard_normal(rng);
    return y;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) {
    const Vector lambda = slope_weights(d, n, sigma, spec.get("weight_scale", 6.0));
    return slope(*design, data.col(0), lambda).theta;
  };
  p.default_estimator = {EstimatorKind::slope, {{"weight_scale", 6.0}}};
  p.estimators = {EstimatorKind::slope};
  p.notes = "loss n^-1 ||X(theta - theta')||^2; bounds use the assumed design constants (c, C)";
  return p;
}

}  // namespace minimaxq
