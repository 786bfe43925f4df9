#include <cmath>

#include <gtest/gtest.h>

#include "minimaxq/divergences.hpp"

using namespace minimaxq;

namespace {

DiscreteDist random_discrete(Rng& rng, int k) {
  std::vector<double> xs, ps;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    xs.push_back(i);
    ps.push_back(uniform01(rng) + 1e-3);
    total += ps.back();
  }
  for (auto& p : ps) p /= total;
  // absorb rounding so the sum is 1 to machine precision
  double rest = 1.0;
  for (int i = 0; i + 1 < k; ++i) rest -= ps[static_cast<std::size_t>(i)];
  ps.back() = rest;
  return DiscreteDist(xs, ps);
}

}  // namespace

TEST(DiscreteDist, MergesDuplicateAtomsAfterRounding) {
  DiscreteDist p({0.0, 1e-14, 1.0}, {0.25, 0.25, 0.5});
  EXPECT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p.mass_at(Vector::Zero(1)), 0.5);
}

TEST(DiscreteDist, RejectsBadProbabilities) {
  EXPECT_THROW(DiscreteDist({0.0, 1.0}, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(DiscreteDist({0.0, 1.0}, {-0.1, 1.1}), std::invalid_argument);
}

TEST(KlGaussian, IdenticalLawsGiveZero) {
  Matrix S(2, 2);
  S << 2.0, 0.3, 0.3, 1.0;
  GaussianDist p(Vector::Ones(2), S);
  EXPECT_NEAR(kl_gaussian(p, p), 0.0, 1e-12);
}

TEST(KlGaussian, MeanShiftAlongTopEigenvector) {
  // n * KL = log(1/(4 delta (1 - delta))) / 2 for the two-point Gaussian pair.
  const int n = 50;
  const double delta = 0.1;
  Matrix S = Vector::LinSpaced(3, 1.0, 3.0).asDiagonal();
  Vector shift = Vector::Zero(3);
  shift[2] = std::sqrt(3.0 * std::log(1.0 / (4 * delta * (1 - delta))) / n);
  GaussianDist p(Vector::Zero(3), S), q(shift, S);
  EXPECT_NEAR(n * kl_gaussian(p, q), 0.5 * std::log(1.0 / (4 * delta * (1 - delta))), 1e-12);
}

TEST(KlGaussian, ScalarVarianceRatio) {
  const double a = 0.8, sigma = 1.7;
  GaussianDist p(Vector::Zero(1), Matrix::Constant(1, 1, a * a * sigma * sigma));
  GaussianDist q(Vector::Zero(1), Matrix::Constant(1, 1, sigma * sigma));
  EXPECT_NEAR(kl_gaussian(p, q), (std::log(1 / (a * a)) - (1 - a * a)) / 2, 1e-14);
}

TEST(KlGaussian, Errors) {
  GaussianDist p(Vector::Zero(2), Matrix::Identity(2, 2));
  GaussianDist singular(Vector::Zero(2), Vector(Vector::Unit(2, 0)).asDiagonal());
  GaussianDist other(Vector::Zero(3), Matrix::Identity(3, 3));
  EXPECT_THROW(kl_gaussian(p, singular), std::domain_error);
  EXPECT_THROW(kl_gaussian(p, other), std::invalid_argument);
  EXPECT_EQ(kl_gaussian(singular, p), kInfinity);
}

TEST(KlGaussian, MatchesMonteCarloLogRatio) {
  Rng rng(7);
  for (int inst = 0; inst < 3; ++inst) {
    const int d = 1 + inst;
    Matrix A = Matrix::Random(d, d), B = Matrix::Random(d, d);
    GaussianDist p(Vector::Random(d), A * A.transpose() + Matrix::Identity(d, d));
    GaussianDist q(Vector::Random(d), B * B.transpose() + 0.5 * Matrix::Identity(d, d));
    const int N = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
      Vector x = p.sample(rng);
      double r = p.log_density(x) - q.log_density(x);
      sum += r;
      sumsq += r * r;
    }
    double mean = sum / N, se = std::sqrt((sumsq / N - mean * mean) / N);
    EXPECT_NEAR(kl_gaussian(p, q), mean, 3 * se + 1e-12);
  }
}

TEST(KlDiscrete, Cases) {
  auto p = bernoulli(0.3);
  EXPECT_EQ(kl_discrete(p, p), 0.0);
  const double s = 0.4;
  EXPECT_NEAR(kl_discrete(bernoulli((1 + s) / 2), bernoulli((1 - s) / 2)),
              s * std::log((1 + s) / (1 - s)), 1e-14);
  EXPECT_EQ(kl_discrete(bernoulli(0.5), bernoulli(0.0)), kInfinity);
}

TEST(TvDiscrete, Cases) {
  EXPECT_EQ(tv_discrete(bernoulli(0.2), bernoulli(0.2)), 0.0);
  EXPECT_NEAR(tv_discrete(bernoulli(0.2), bernoulli(0.7)), 0.5, 1e-15);
  const double eps = 0.1;
  const double a = (eps + eps * eps) / 2, b = (3 * eps + eps * eps) / 2;
  DiscreteDist X({-1.0, 0.0, 1.0}, {eps, 1 - 2 * eps, eps});
  DiscreteDist Y({-1.0, 0.0, 1.0}, {a, 1 - a - b, b});
  EXPECT_NEAR(tv_discrete(X, Y), (eps + eps * eps) / 2, 1e-15);
}

TEST(Tensorize, Cases) {
  EXPECT_EQ(tensorize_kl(0.0, 5), 0.0);
  EXPECT_EQ(tensorize_kl(0.5, 4), 2.0);
  const int n = 30, d = 10;
  EXPECT_NEAR(tensorize_kl(std::log(d) / (4.0 * n), n), std::log(d) / 4.0, 1e-15);
}

TEST(TvProductExact, FourOutcomeEnumeration) {
  const double p = 0.5, q = 0.9;
  double half_sum = 0.0;
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2) {
      double pp = (x1 ? p : 1 - p) * (x2 ? p : 1 - p);
      double qq = (x1 ? q : 1 - q) * (x2 ? q : 1 - q);
      half_sum += 0.5 * std::abs(pp - qq);
    }
  EXPECT_NEAR(tv_product_exact(bernoulli(p), bernoulli(q), 2), half_sum, 1e-15);
  EXPECT_NEAR(tv_product_exact(bernoulli(p), bernoulli(q), 1), 0.4, 1e-15);
  EXPECT_EQ(tv_product_exact(bernoulli(0.3), bernoulli(0.3), 4), 0.0);
}

TEST(TvProductExact, CapacityError) {
  DiscreteDist p({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, std::vector<double>(10, 0.1));
  EXPECT_THROW(tv_product_exact(p, p, 8), CapacityError);
}

TEST(TvProductExact, MonotoneAndSubadditiveInN) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    auto p = random_discrete(rng, 3), q = random_discrete(rng, 3);
    const double tv1 = tv_discrete(p, q);
    double prev = 0.0;
    for (int n = 1; n <= 6; ++n) {
      double tv = tv_product_exact(p, q, n);
      EXPECT_GE(tv, prev - 1e-12);
      EXPECT_LE(tv, std::min(1.0, n * tv1) + 1e-12);
      prev = tv;
    }
  }
}

TEST(TvBounds, ClosedForms) {
  EXPECT_EQ(bretagnolle_huber_tv_bound(0.0), 0.0);
  EXPECT_NEAR(bretagnolle_huber_tv_bound(std::log(1.0 / (4 * 0.1 * 0.9))), 0.8, 1e-15);
  EXPECT_EQ(bretagnolle_huber_tv_bound(kInfinity), 1.0);
  EXPECT_EQ(pinsker_tv_bound(0.0), 0.0);
  EXPECT_NEAR(pinsker_tv_bound(8.0 / 9.0), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(pinsker_tv_bound(2.0), 1.0);
}

TEST(TvBounds, HoldOnRandomPairs) {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    auto p = random_discrete(rng, k), q = random_discrete(rng, k);
    const double tv = tv_discrete(p, q), kl = kl_discrete(p, q);
    EXPECT_LE(tv, pinsker_tv_bound(kl) + 1e-12);
    EXPECT_LE(tv, bretagnolle_huber_tv_bound(kl) + 1e-12);
    EXPECT_GE(kl, 0.0);
  }
}

TEST(ProductDist, KlTensorizes) {
  ProductDist p(bernoulli(0.3), 4), q(bernoulli(0.6), 4);
  EXPECT_NEAR(kl_product(p, q), 4 * kl_discrete(bernoulli(0.3), bernoulli(0.6)), 1e-15);
  Rng rng(1);
  EXPECT_EQ(p.sample(rng).size(), 4);
}
