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

// Default median-of-means block count for confidence level delta.
inline int mom_blocks(double delta) { return static_cast<int>(std::ceil(8.0 * std::log(1.0 / delta))); }

// sample_mean, or median_of_means applied coordinatewise.
inline Vector mean_estimate(const EstimatorSpec& spec, const Dataset& data, double design_delta) {
  if (spec.kind == EstimatorKind::sample_mean) return sample_mean(data);
  const auto n = static_cast<int>(data.rows());
  const int k = std::min(n, static_cast<int>(spec.get("blocks", mom_blocks(design_delta))));
  Vector out(data.cols());
  for (Eigen::Index j = 0; j < data.cols(); ++j) out[j] = median_of_means(data.col(j), k);
  return out;
}

struct Spectrum {
  Vector values;  // ascending
  Matrix vectors;

  double top() const { return values[values.size() - 1]; }
  Vector top_vector() const { return vectors.col(vectors.cols() - 1); }
  double trace() const { return values.sum(); }
};

inline Spectrum spectrum_pd(const Matrix& Sigma) {
  require(Sigma.rows() == Sigma.cols() && Sigma.rows() >= 1, "covariance must be square");
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::domain_error("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(Sigma);
  if (!(es.eigenvalues().minCoeff() > 0.0)) throw std::domain_error("covariance is not positive definite");
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace detail {

inline std::vector<BoundCertificate> gaussian_mean_certificates(int n, const Matrix& Sigma, const Spectrum& sp,
                                                                const LossModel& loss, double delta) {
  std::vector<BoundCertificate> out;
  const auto d = Sigma.rows();
  const GaussianDist P0(Vector::Zero(d), Sigma);

  // two-point pair along the top eigenvector
  const Vector theta2 = std::sqrt(sp.top() / n * two_point_budget(delta)) * sp.top_vector();
  const double kl = tensorize_kl(kl_gaussian(P0, GaussianDist(theta2, Sigma)), n);
  if (auto c = two_point_certificate(kl, Vector::Zero(d), theta2, loss, delta)) out.push_back(*c);

  // Assouad cube at the boosted sample size, then risk-to-quantile and boosting
  const double d_lo = 1.0 / 15.0, d_hi = 0.25;
  if (delta <= d_hi) {
    const int k = boost_find_k(d_lo, d_hi);
    const int np = boost_product_power(k) * n;
    std::vector<double> alphas;
    double tv = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      const double a = (4.0 / 3.0) * std::sqrt(sp.values[j] / np);
      alphas.push_back(a);
      const double kl_adj = tensorize_kl(kl_gaussian(P0, GaussianDist(a * sp.vectors.col(j), Sigma)), np);
      tv = std::max(tv, pinsker_tv_bound(kl_adj));
    }
    const double risk = assouad_risk_lb(alphas, tv, loss.g(), loss.A());
    double diam2 = 0.0;
    for (double a : alphas) diam2 += a * a;
    if (auto base = risk_to_quantile(risk, std::sqrt(diam2), loss.g(), 3.0 / 40.0))
      if (base->valid_at(d_lo)) out.push_back(boost_certificate(*base, d_lo, d_hi, loss.A()));
  }
  return out;
}

// Hypotheses of the mean problem: the two-point pair and the cube vertices
// adjacent to the origin (all adjacent pairs of the cube are translates).
inline std::vector<Hypothesis> gaussian_mean_hypotheses(int n, const Spectrum& sp, double delta) {
  const auto d = sp.values.size();
  std::vector<Hypothesis> hs;
  hs.push_back({Vector::Zero(d), "two-point theta_1 = 0", true});
  hs.push_back({std::sqrt(sp.top() / n * two_point_budget(delta)) * sp.top_vector(), "two-point theta_2", true});
  const int np = boost_product_power(boost_find_k(1.0 / 15.0, 0.25)) * n;
  for (Eigen::Index j = 0; j < d; ++j)
    hs.push_back({(4.0 / 3.0) * std::sqrt(sp.values[j] / np) * sp.vectors.col(j),
                  "cube vertex e_" + std::to_string(j + 1), false});
  return hs;
}

}  // namespace detail

inline ProblemInstance gaussian_mean_sq(int n, const Matrix& Sigma, double design_delta = 0.05) {
  require(n >= 1, "gaussian_mean_sq: n must be >= 1");
  require(design_delta > 0.0 && design_delta < 0.5, "gaussian_mean_sq: design delta outside (0,1/2)");
  const auto sp = spectrum_pd(Sigma);
  const double tr = sp.trace(), op = sp.top();
  const double nn = n;
  LossModel loss(Metric::euclidean, Transform::square());

  ProblemInstance p;
  p.name = "gaussian_mean_sq";
  p.n = n;
  p.d = static_cast<int>(Sigma.rows());
  p.design_delta = design_delta;
  p.loss = loss;
  p.hypotheses = detail::gaussian_mean_hypotheses(n, sp, design_delta);

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    return tr / (128.0 * 9.0 * 25.0 * nn) + op * std::log(1.0 / delta) / (40.0 * nn);
  };
  p.certificates = [=](double delta) { return detail::gaussian_mean_certificates(n, Sigma, sp, loss, delta); };

  p.ub_range = {1.0, false};
  p.ub_formula = [=](double delta) { return 2.0 * tr / nn + 4.0 * op * std::log(1.0 / delta) / nn; };
  p.ub_certified = true;
  p.ub_estimators = {EstimatorKind::sample_mean};

  const GaussianDist base(Vector::Zero(Sigma.rows()), Sigma);
  auto thetas = std::make_shared<std::vector<Vector>>();
  for (const auto& h : p.hypotheses) thetas->push_back(h.theta);
  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset X(n, Sigma.rows());
    base.sample_rows(rng, X);
    X.rowwise() += (*thetas)[h].transpose();
    return X;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) { return mean_estimate(spec, data, design_delta); };
  p.default_estimator = {EstimatorKind::sample_mean, {}};
  p.estimators = {EstimatorKind::sample_mean, EstimatorKind::median_of_means};
  p.notes = "squared Euclidean loss; lb halves the two-point and boosted Assouad pieces";
  return p;
}

// Three-point laws of the contaminated-mean construction, along the top
// eigenvector: atoms -t, 0, t with t = sqrt(lambda_1 / (2 eps)).
struct HuberCore {
  double eps = 0.0, t = 0.0, a = 0.0, b = 0.0;
  DiscreteDist R1, R2;
  MixtureWitnesses witnesses;
};

inline HuberCore huber_core(double lambda1, double eps) {
  // 1 - a - b = 1 - 2 eps - eps^2 must stay nonnegative
  if (!(eps > 0.0 && eps <= std::sqrt(2.0) - 1.0))
    throw std::domain_error("robust_mean_huber: eps must lie in (0, sqrt(2) - 1]");
  HuberCore c;
  c.eps = eps;
  c.t = std::sqrt(lambda1 / (2.0 * eps));
  c.a = (eps + eps * eps) / 2.0;
  c.b = (3.0 * eps + eps * eps) / 2.0;
  c.R1 = DiscreteDist({-c.t, 0.0, c.t}, {eps, 1.0 - 2.0 * eps, eps});
  c.R2 = DiscreteDist({-c.t, 0.0, c.t}, {c.a, std::max(0.0, 1.0 - c.a - c.b), c.b});
  c.witnesses = huber_mixture_witnesses(c.R1, c.R2);
  return c;
}

inline ProblemInstance robust_mean_huber(int n, const Matrix& Sigma, double eps, double design_delta = 0.05) {
  ProblemInstance p = gaussian_mean_sq(n, Sigma, design_delta);
  const auto sp = spectrum_pd(Sigma);
  const auto core = huber_core(sp.top(), eps);
  const Vector v1 = sp.top_vector();
  const Vector theta1 = core.R1.mean()[0] * v1, theta2 = core.R2.mean()[0] * v1;
  const double tv = tv_discrete(core.R1, core.R2);
  const LossModel loss = *p.loss;
  const double op = sp.top();

  p.name = "robust_mean_huber";
  const auto gauss_lb = p.lb_formula;
  p.lb_formula = [=](double delta) { return std::max(gauss_lb(delta), op * eps / 8.0); };
  const auto gauss_certs = p.certificates;
  p.certificates = [=](double delta) {
    auto out = gauss_certs(delta);
    if (auto c = huber_modulus_lb(theta1, theta2, tv, eps, loss)) out.push_back(*c);
    return out;
  };
  p.ub_formula = nullptr;
  p.ub_certified = false;
  p.ub_estimators.clear();

  // Both hypotheses produce the same contaminated law.
  p.hypotheses = {{theta1, "core law R1 contaminated", true}, {theta2, "core law R2 contaminated", true}};
  const DiscreteDist observed = contaminate(core.R1, core.witnesses.Q1, core.witnesses.eps_prime);
  const Vector rest = sp.values.head(sp.values.size() - 1).cwiseSqrt();
  const Matrix rest_vectors = sp.vectors.leftCols(sp.values.size() - 1);
  p.sampler = [=](std::size_t, Rng& rng) {
    Dataset X(n, v1.size());
    Vector z(rest.size());
    for (int i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = rest[j] * standard_normal(rng);
      X.row(i) = (observed.sample(rng)[0] * v1 + rest_vectors * z).transpose();
    }
    return X;
  };
  p.notes = "lower bound only; the two contaminated laws coincide, so no estimator separates them";
  return p;
}

inline ProblemInstance gaussian_mean_linf(int n, int d, double sigma, double design_delta = 0.05) {
  require(n >= 1 && d >= 1 && sigma > 0.0, "gaussian_mean_linf: need n, d >= 1 and sigma > 0");
  require(design_delta > 0.0 && design_delta < 0.5, "gaussian_mean_linf: design delta outside (0,1/2)");
  const double nn = n, dd = d;
  LossModel loss(Metric::linf, Transform::identity());
  const Matrix cov = sigma * sigma * Matrix::Identity(d, d);

  ProblemInstance p;
  p.name = "gaussian_mean_linf";
  p.n = n;
  p.d = d;
  p.design_delta = design_delta;
  p.loss = loss;
  auto two_point = [=](double delta) {
    Vector t = Vector::Zero(d);
    t[0] = sigma * std::sqrt(two_point_budget(delta) / nn);
    return t;
  };
  const double fano_scale = sigma * std::sqrt(std::log(dd) / (2.0 * nn));
  p.hypotheses = {{Vector::Zero(d), "two-point theta_1 = 0", true}, {two_point(design_delta), "two-point theta_2", true}};
  if (d >= 2)
    for (int j = 0; j < d; ++j) {
      Vector t = Vector::Zero(d);
      t[j] = fano_scale;
      p.hypotheses.push_back({t, "Fano e_" + std::to_string(j + 1), false});
    }

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    return sigma * std::sqrt(std::log(dd / delta) / ((d >= 4 ? 80.0 : 40.0) * nn));
  };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const GaussianDist Q(Vector::Zero(d), cov);
    const Vector t = two_point(delta);
    const double kl = tensorize_kl(kl_gaussian(Q, GaussianDist(t, cov)), n);
    if (auto c = two_point_certificate(kl, Vector::Zero(d), t, loss, delta)) out.push_back(*c);
    if (d >= 2) {
      std::vector<double> kls;
      for (int j = 0; j < d; ++j) {
        Vector m = Vector::Zero(d);
        m[j] = fano_scale;
        kls.push_back(tensorize_kl(kl_gaussian(GaussianDist(m, cov), Q), n));
      }
      // distinct family members are fano_scale apart in sup norm
      if (auto c = fano_quantile_lb(kls, fano_scale / 2.0, loss.g())) out.push_back(*c);
    }
    return out;
  };

  p.ub_range = {1.0, false};
  p.ub_formula = [=](double delta) { return sigma * std::sqrt(2.0 * std::log(dd / delta) / nn); };
  p.ub_certified = true;
  p.ub_estimators = {EstimatorKind::sample_mean};

  auto thetas = std::make_shared<std::vector<Vector>>();
  for (const auto& h : p.hypotheses) thetas->push_back(h.theta);
  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset X(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) X(i, j) = sigma * standard_normal(rng);
    X.rowwise() += (*thetas)[h].transpose();
    return X;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) { return mean_estimate(spec, data, design_delta); };
  p.default_estimator = {EstimatorKind::sample_mean, {}};
  p.estimators = {EstimatorKind::sample_mean, EstimatorKind::median_of_means};
  p.notes = "sup-norm loss; Fano family sigma sqrt(log d / (2n)) e_j against Q = N(0, sigma^2 I)";
  return p;
}

}  // namespace minimaxq
