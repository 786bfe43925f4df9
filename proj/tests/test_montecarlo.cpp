#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "minimaxq/divergences.hpp"
#include "minimaxq/montecarlo.hpp"
#include "minimaxq/problems.hpp"

using namespace minimaxq;

TEST(EmpiricalQuantile, OrderStatisticConvention) {
  const auto q = empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.25);
  EXPECT_EQ(q.value, 3.0);
  EXPECT_EQ(q.reps, 4u);
  EXPECT_EQ(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 1.0).value, 1.0);
  EXPECT_EQ(empirical_quantile({4.0, 1.0, 3.0, 2.0}, 0.01).value, 4.0);
  // (1 - 0.01) * 100000 rounds above 99000 in floating point
  std::vector<double> ramp(100000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i + 1);
  EXPECT_EQ(empirical_quantile(ramp, 0.01).value, 99000.0);
  EXPECT_THROW(empirical_quantile({}, 0.1), std::invalid_argument);
  EXPECT_THROW(empirical_quantile({1.0}, 0.0), std::invalid_argument);
}

TEST(EmpiricalQuantile, ConstantLossesGiveDegenerateBand) {
  const auto q = empirical_quantile(std::vector<double>(37, 2.5), 0.1);
  EXPECT_EQ(q.value, 2.5);
  EXPECT_EQ(q.dkw_lo, 2.5);
  EXPECT_EQ(q.dkw_hi, 2.5);
}

TEST(EmpiricalQuantile, UniformLawQuantile) {
  Rng rng(2);
  std::vector<double> u(1000000);
  for (auto& x : u) x = uniform01(rng);
  const auto q = empirical_quantile(u, 0.1);
  EXPECT_NEAR(q.value, 0.9, 0.005);
  EXPECT_LE(q.dkw_lo, 0.9);
  EXPECT_GE(q.dkw_hi, 0.9);
  EXPECT_LE(q.dkw_lo, q.value);
  EXPECT_LE(q.value, q.dkw_hi);
}

TEST(EmpiricalQuantile, MonotoneInDelta) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1 + trial * 13);
    for (auto& x : v) x = std::exp(standard_normal(rng));
    double prev = -1.0;
    for (double delta : {1.0, 0.7, 0.5, 0.25, 0.1, 0.05, 0.01, 0.001}) {
      const auto q = empirical_quantile(v, delta);
      EXPECT_GE(q.value, prev);
      EXPECT_LE(q.dkw_lo, q.value);
      EXPECT_LE(q.value, q.dkw_hi);
      prev = q.value;
    }
  }
}

TEST(RunExperiment, SingleReplication) {
  const auto p = make_problem("isotonic", {{{"n", "20"}}});
  const auto res = run_experiment(p, p.default_estimator, 1, {0.5, 0.1}, 3);
  ASSERT_EQ(res.size(), p.simulated_hypotheses().size());
  for (const auto& r : res) {
    ASSERT_EQ(r.losses.size(), 1u);
    for (const auto& q : r.quantiles) EXPECT_EQ(q.value, r.losses[0]);
  }
}

TEST(RunExperiment, IdenticalAcrossThreadCounts) {
  for (const std::string name : {"gaussian_mean_sq", "sco_hard_instance", "density_point"}) {
    const auto p = make_problem(name, {{{"n", "64"}}});
    const auto a = run_experiment(p, p.default_estimator, 301, {0.05}, 99, 1);
    const auto b = run_experiment(p, p.default_estimator, 301, {0.05}, 99, 4);
    const auto c = run_experiment(p, p.default_estimator, 301, {0.05}, 99, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t h = 0; h < a.size(); ++h) {
      EXPECT_EQ(a[h].losses, b[h].losses) << name;
      EXPECT_EQ(a[h].losses, c[h].losses) << name;
    }
  }
  const auto p = make_problem("gaussian_mean_sq", {{{"n", "64"}}});
  EXPECT_NE(run_experiment(p, p.default_estimator, 50, {0.05}, 99)[0].losses,
            run_experiment(p, p.default_estimator, 50, {0.05}, 100)[0].losses);
}

TEST(RunExperiment, RejectsUnsupportedEstimator) {
  const auto p = make_problem("isotonic", {{{"n", "20"}}});
  EXPECT_THROW(run_experiment(p, {EstimatorKind::slope, {}}, 10, {0.1}, 1), std::invalid_argument);
  EXPECT_THROW(run_experiment(p, p.default_estimator, 0, {0.1}, 1), std::invalid_argument);
}

TEST(RunExperiment, ExceptionsInWorkersPropagate) {
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::size_t r) {
                              if (r == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(RunExperiment, GaussianMeanMatchesChiSquaredQuantile) {
  // Sigma = I: n ||mean - theta||^2 ~ chi^2_d
  const int n = 20, d = 3;
  const auto p = gaussian_mean_sq(n, Matrix::Identity(d, d));
  const auto res = run_experiment(p, p.default_estimator, 20000, {0.1, 0.05}, 12, 2, std::vector<std::size_t>{0});
  const boost::math::chi_squared chi(d);
  for (const auto& q : res[0].quantiles) {
    const double exact = boost::math::quantile(chi, 1.0 - q.delta) / n;
    EXPECT_LE(q.dkw_lo, exact) << q.delta;
    EXPECT_GE(q.dkw_hi, exact) << q.delta;
  }
}

TEST(Sandwich, Verdicts) {
  const QuantileEstimate q{0.1, 1.0, 100, 0.8, 1.2};
  auto v = sandwich_check(0.0, q, std::nullopt);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(v.upper_margin);
  v = sandwich_check(1.5, q, 3.0);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.lower_ok);
  EXPECT_NEAR(*v.lower_margin, -0.3, 1e-15);
  v = sandwich_check(0.5, q, 0.7);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.upper_ok);
  EXPECT_NEAR(*v.upper_margin, -0.1, 1e-15);
  v = sandwich_check(1.2, q, 0.8);
  EXPECT_TRUE(v.pass);
  EXPECT_TRUE(sandwich_check(std::nullopt, q, std::nullopt).pass);
}

TEST(Sandwich, GaussianMeanPasses) {
  const auto p = gaussian_mean_sq(200, mean_covariance(5, "linear", 1.0));
  for (const auto& r : run_experiment(p, p.default_estimator, 2000, {0.05}, 5, 2))
    EXPECT_TRUE(sandwich_check(p.lb(0.05), r.quantiles[0], p.ub(0.05)).pass) << r.hypothesis;
}

namespace {

const LossModel kThresholdLoss(Metric::scalar_abs, Transform::threshold(0.25));
const std::vector<Vector> kGrid = {Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)};

}  // namespace

TEST(BruteForce, BernoulliJumpAtLikelihoodRatioError) {
  const auto P1 = bernoulli(0.2), P2 = bernoulli(0.8);
  // best rule sends 00 -> 0, 11 -> 1 and splits the ties: both errors 0.2
  for (double delta : {0.05, 0.19, 0.1999}) {
    const auto v = brute_force_minimax(P1, P2, 2, kGrid, kThresholdLoss, delta);
    EXPECT_EQ(v.M_minus, 1.0) << delta;
    EXPECT_EQ(v.M, 1.0) << delta;
  }
  for (double delta : {0.2, 0.3, 1.0}) {
    const auto v = brute_force_minimax(P1, P2, 2, kGrid, kThresholdLoss, delta);
    EXPECT_EQ(v.M_minus, 0.0) << delta;
    EXPECT_EQ(v.M, 0.0) << delta;
  }
  EXPECT_EQ(brute_force_minimax(P1, P2, 2, kGrid, kThresholdLoss, 0.1).estimators, 16u);
}

TEST(BruteForce, IdenticalLawsCannotBeSeparated) {
  const auto P = bernoulli(0.3);
  for (double delta : {0.1, 0.3, 0.49}) {
    const auto v = brute_force_minimax(P, P, 2, kGrid, kThresholdLoss, delta);
    EXPECT_EQ(v.M_minus, 1.0);
    const auto cert = le_cam_quantile_lb(tv_product_exact(P, P, 2), 0.5, kThresholdLoss.g(), delta);
    ASSERT_TRUE(cert);
    EXPECT_LE(cert->value, v.M_minus);
  }
  // at delta = 1 every rule qualifies
  EXPECT_EQ(brute_force_minimax(P, P, 2, kGrid, kThresholdLoss, 1.0).M, 0.0);
}

TEST(BruteForce, CapacityLimit) {
  const std::vector<Vector> grid = {Vector::Constant(1, 0.0), Vector::Constant(1, 1.0), Vector::Constant(1, 0.5)};
  EXPECT_THROW(brute_force_minimax(bernoulli(0.2), bernoulli(0.7), 4, grid, kThresholdLoss, 0.1), CapacityError);
  EXPECT_THROW(brute_force_minimax(bernoulli(0.2), bernoulli(0.7), 5, kGrid, kThresholdLoss, 0.1),
               std::invalid_argument);
}

TEST(BruteForce, SandwichAndCertificatesOnRandomInstances) {
  Rng rng(31);
  int issued = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const double a = 0.02 + 0.96 * uniform01(rng), b = 0.02 + 0.96 * uniform01(rng);
    const int n = 1 + trial % 3;
    const double delta = 0.01 + 0.48 * uniform01(rng);
    const auto P1 = bernoulli(a), P2 = bernoulli(b);
    // a third grid point at 1/2 is within the threshold of neither parameter
    std::vector<Vector> grid = kGrid;
    if (trial % 2) grid.push_back(Vector::Constant(1, 0.5));
    const auto v = brute_force_minimax(P1, P2, n, grid, kThresholdLoss, delta);
    const auto half = brute_force_minimax(P1, P2, n, grid, kThresholdLoss, delta / 2.0);
    EXPECT_LE(v.M_minus, v.M);
    EXPECT_LE(v.M, half.M_minus);
    const double kl = tensorize_kl(kl_discrete(P1, P2), n);
    std::vector<std::optional<BoundCertificate>> certs = {
        le_cam_quantile_lb(tv_product_exact(P1, P2, n), 0.5, kThresholdLoss.g(), delta),
        le_cam_kl_quantile_lb(kl, 0.5, kThresholdLoss.g(), delta),
        fano_quantile_lb({0.0, kl}, 0.5, kThresholdLoss.g())};
    for (const auto& c : certs)
      if (c && c->valid_at(delta)) {
        ++issued;
        EXPECT_LE(c->value, v.M_minus) << "a=" << a << " b=" << b << " n=" << n << " delta=" << delta;
      }
  }
  EXPECT_GT(issued, 10);
}

TEST(RateFit, PowerLawsAndErrors) {
  std::vector<std::pair<double, double>> pts;
  for (double n : {10.0, 100.0, 1000.0, 5000.0}) pts.emplace_back(n, 3.0 * std::pow(n, -2.0 / 3.0));
  EXPECT_NEAR(rate_fit(pts), -2.0 / 3.0, 1e-12);
  EXPECT_NEAR(rate_fit({{1.0, 2.0}, {2.0, 2.0}, {7.0, 2.0}}), 0.0, 1e-12);
  EXPECT_THROW(rate_fit({{1.0, 2.0}, {2.0, 0.0}, {3.0, 1.0}}), std::invalid_argument);
  EXPECT_THROW(rate_fit({{1.0, 2.0}, {2.0, 1.0}}), std::invalid_argument);
}
