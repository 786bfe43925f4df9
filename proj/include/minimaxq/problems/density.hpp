#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators/kde.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// Two Hoelder densities that differ only near 0 and near 2w:
//   f0 = ((g + h)(x) + g(2w - x)) / Z,  f1 = (g(x) + (g + h)(2w - x)) / Z,
// with g a rescaled bump, h a narrower bump of height lambda times g's,
// w = gamma_tilde^{-1/(beta+1)} and Z = 2 + lambda^{(beta+1)/beta}.
class DensityPair {
 public:
  DensityPair(double beta, double gamma, double lambda) : beta_(beta), gamma_(gamma), lambda_(lambda), K_(Kernel::bump()) {
    require(beta > 0.0 && beta <= 2.0, "DensityPair: beta outside (0,2]");
    require(gamma > 0.0, "DensityPair: gamma must be positive");
    require(lambda > 0.0 && lambda <= 1.0, "DensityPair: lambda outside (0,1]");
    holder_ = K_.holder_norm(beta);
    gamma_tilde_ = gamma / holder_;
    scale_ = std::pow(gamma_tilde_, 1.0 / (beta + 1.0));
    w_ = 1.0 / scale_;
    narrow_ = std::pow(lambda, -1.0 / beta);
    Z_ = 2.0 + std::pow(lambda, (beta + 1.0) / beta);
  }

  double g(double x) const { return scale_ * K_(scale_ * x); }
  double h(double x) const { return lambda_ * scale_ * K_(narrow_ * scale_ * x); }
  double f0(double x) const { return (g(x) + h(x) + g(2.0 * w_ - x)) / Z_; }
  double f1(double x) const { return (g(x) + g(2.0 * w_ - x) + h(2.0 * w_ - x)) / Z_; }
  double f(int which, double x) const { return which == 0 ? f0(x) : f1(x); }

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double lambda() const { return lambda_; }
  double gamma_tilde() const { return gamma_tilde_; }
  double kernel_holder_norm() const { return holder_; }
  double normalizer() const { return Z_; }
  double w() const { return w_; }
  // half width of I = supp h; I' is its mirror image about w
  double h_half_width() const { return K_.half_width() * w_ / narrow_; }
  double support_lo() const { return -K_.half_width() * w_; }
  double support_hi() const { return 2.0 * w_ + K_.half_width() * w_; }
  bool in_I_or_Iprime(double x) const {
    return std::abs(x) < h_half_width() || std::abs(x - 2.0 * w_) < h_half_width();
  }

  // Per-sample KL(f0, f1). The I and I' contributions combine to
  // Z^{-1} \int h log(1 + h/g).
  double kl() const {
    const double a = h_half_width();
    return integrate(
               [&](double x) {
                 const double hx = h(x), gx = g(x);
                 return hx > 0.0 && gx > 0.0 ? hx * std::log1p(hx / gx) : 0.0;
               },
               -a, a) /
           Z_;
  }

  // Rejection from the envelope alpha0 g(x) + alpha1 g(2w - x), which
  // dominates Z f since h <= lambda g.
  double sample(int which, Rng& rng) const {
    const double a0 = which == 0 ? 1.0 + lambda_ : 1.0, a1 = which == 0 ? 1.0 : 1.0 + lambda_;
    for (;;) {
      const double u = sample_g(rng);
      const double x = uniform01(rng) * (a0 + a1) < a0 ? u : 2.0 * w_ - u;
      const double env = a0 * g(x) + a1 * g(2.0 * w_ - x);
      if (uniform01(rng) * env <= Z_ * f(which, x)) return x;
    }
  }

 private:
  double sample_g(Rng& rng) const {
    const double top = K_.sup(), hw = K_.half_width();
    for (;;) {
      const double v = (2.0 * uniform01(rng) - 1.0) * hw;
      if (uniform01(rng) * top <= K_(v)) return v * w_;
    }
  }

  double beta_, gamma_, lambda_;
  Kernel K_;
  double holder_ = 0.0, gamma_tilde_ = 0.0, scale_ = 0.0, w_ = 0.0, narrow_ = 1.0, Z_ = 2.0;
};

inline double density_lambda(int n, double beta, double delta) {
  return std::min(std::pow(two_point_budget(delta) / n, beta / (2.0 * beta + 1.0)), 1.0);
}

// Point estimation of a Hoelder density at 0 under squared loss.
inline ProblemInstance density_point(int n, double beta, double gamma, double design_delta = 0.05) {
  require(n >= 1, "density_point: n must be >= 1");
  require(beta > 0.0 && beta <= 2.0, "density_point: beta outside (0,2]");
  require(gamma > 0.0, "density_point: gamma must be positive");
  require(design_delta > 0.0 && design_delta < 0.5, "density_point: design delta outside (0,1/2)");
  const double nn = n;
  const double rate_exp = 2.0 * beta / (2.0 * beta + 1.0);
  LossModel loss(Metric::scalar_abs, Transform::square());
  auto pair = std::make_shared<const DensityPair>(beta, gamma, density_lambda(n, beta, design_delta));
  const double H = pair->kernel_holder_norm();
  const Kernel epan = Kernel::epanechnikov();

  ProblemInstance p;
  p.name = "density_point";
  p.n = n;
  p.d = 1;
  p.design_delta = design_delta;
  p.loss = loss;
  p.hypotheses = {{scalar_vector(pair->f0(0.0)), "f0", true}, {scalar_vector(pair->f1(0.0)), "f1", true}};

  p.lb_range = {0.25, true};
  p.lb_formula = [=](double delta) {
    const double c = std::pow(gamma, 2.0 / (beta + 1.0)) /
                     (36.0 * std::pow(5.0, rate_exp) * std::pow(H, 2.0 / (beta + 1.0)));
    return c * std::min(std::pow(std::log(1.0 / delta) / nn, rate_exp), 1.0);
  };
  p.certificates = [=](double delta) {
    std::vector<BoundCertificate> out;
    const DensityPair dp(beta, gamma, density_lambda(n, beta, delta));
    const double kl = tensorize_kl(dp.kl(), n);
    if (auto c = two_point_certificate(kl, scalar_vector(dp.f0(0.0)), scalar_vector(dp.f1(0.0)), loss, delta))
      out.push_back(*c);
    return out;
  };

  // Lepski guarantee for the Epanechnikov estimator, capped by the clipping range.
  const auto kc = kde_constants(beta, epan);
  const double G2 = std::pow(gamma, 2.0 / (beta + 1.0));
  p.ub_range = {1.0, true};
  p.ub_formula = [=](double delta) -> std::optional<double> {
    return std::min(4.0 * kc.C * G2 * std::pow(std::log(8.0 / delta) / nn, rate_exp), kc.C1 * kc.C1 * G2);
  };
  p.ub_certified = beta <= 1.0;
  p.ub_estimators = {EstimatorKind::kde_lepski};

  p.sampler = [=](std::size_t h, Rng& rng) {
    Dataset X(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = pair->sample(static_cast<int>(h), rng);
    return X;
  };
  p.estimator = [=](const EstimatorSpec& spec, const Dataset& data) {
    const Vector x = data.col(0);
    if (spec.kind == EstimatorKind::kde_lepski) return scalar_vector(lepski_kde(x, 0.0, beta, gamma, epan, spec.get("C1", 0.0)));
    const auto k = kde_constants(beta, epan, spec.get("C1", 0.0));
    const double h = spec.get("bandwidth", kde_bandwidth(k, gamma, nn, std::log(2.0 / design_delta)));
    return scalar_vector(kde_point(x, 0.0, h, epan));
  };
  p.default_estimator = {EstimatorKind::kde_lepski, {}};
  p.estimators = {EstimatorKind::kde_lepski, EstimatorKind::kde_fixed};
  p.notes = "squared error at x0 = 0; hypotheses are the bump pair built at the design delta";
  return p;
}

}  // namespace minimaxq
