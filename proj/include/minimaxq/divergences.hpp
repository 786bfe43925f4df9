#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "minimaxq/distributions.hpp"

namespace minimaxq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kEnumerationCapacity = 10'000'000;

inline double kl_gaussian(const GaussianDist& p, const GaussianDist& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("kl_gaussian: dimension mismatch");
  Eigen::LLT<Matrix> llt(q.covariance());
  if (llt.info() != Eigen::Success)
    throw std::domain_error("kl_gaussian: q covariance is not positive definite");
  Matrix lq = llt.matrixL();
  for (Eigen::Index i = 0; i < lq.rows(); ++i)
    if (!(lq(i, i) > 0.0)) throw std::domain_error("kl_gaussian: q covariance is singular");

  Eigen::SelfAdjointEigenSolver<Matrix> es(p.covariance(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) return kInfinity;  // p degenerate, q not
  double logdet_p = es.eigenvalues().array().log().sum();
  double logdet_q = 2.0 * lq.diagonal().array().log().sum();

  double trace = llt.solve(p.covariance()).trace();
  Vector diff = q.mean() - p.mean();
  double maha = diff.dot(llt.solve(diff));
  double d = static_cast<double>(p.dim());
  double kl = 0.5 * (trace - d + maha + logdet_q - logdet_p);
  return kl > 0.0 ? kl : 0.0;
}

inline double kl_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  double kl = 0.0;
  for (const auto& [pi, qi] : merged_masses(p, q)) {
    if (pi <= 0.0) continue;
    if (qi <= 0.0) return kInfinity;
    kl += pi * std::log(pi / qi);
  }
  return kl > 0.0 ? kl : 0.0;
}

inline double tv_discrete(const DiscreteDist& p, const DiscreteDist& q) {
  double s = 0.0;
  for (const auto& [pi, qi] : merged_masses(p, q)) s += std::abs(pi - qi);
  return std::clamp(0.5 * s, 0.0, 1.0);
}

inline double tensorize_kl(double kl_per_sample, int n) {
  require(kl_per_sample >= 0.0, "tensorize_kl: negative divergence");
  require(n >= 1, "tensorize_kl: n must be >= 1");
  return static_cast<double>(n) * kl_per_sample;
}

// Number of outcomes of an n-fold product over k atoms; throws past capacity.
inline std::size_t product_outcomes(std::size_t k, int n, std::size_t capacity = kEnumerationCapacity) {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > capacity / std::max<std::size_t>(k, 1)) throw CapacityError("product support exceeds capacity");
    total *= k;
  }
  if (total > capacity) throw CapacityError("product support exceeds capacity");
  return total;
}

inline double tv_product_exact(const DiscreteDist& p, const DiscreteDist& q, int n) {
  require(n >= 1, "tv_product_exact: n must be >= 1");
  auto masses = merged_masses(p, q);
  const std::size_t k = masses.size();
  const std::size_t total = product_outcomes(k, n);
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  double s = 0.0;
  for (std::size_t idx = 0; idx < total; ++idx) {
    double pp = 1.0, qq = 1.0;
    for (auto dgt : digit) {
      pp *= masses[dgt].first;
      qq *= masses[dgt].second;
    }
    s += std::abs(pp - qq);
    for (std::size_t j = 0; j < digit.size(); ++j) {
      if (++digit[j] < k) break;
      digit[j] = 0;
    }
  }
  return std::clamp(0.5 * s, 0.0, 1.0);
}

inline double bretagnolle_huber_tv_bound(double kl) {
  require(kl >= 0.0, "bretagnolle_huber_tv_bound: negative divergence");
  if (std::isinf(kl)) return 1.0;
  return std::sqrt(-std::expm1(-kl));
}

inline double pinsker_tv_bound(double kl) {
  require(kl >= 0.0, "pinsker_tv_bound: negative divergence");
  return std::sqrt(kl / 2.0);
}

inline double kl_base(const BaseDist& p, const BaseDist& q) {
  if (std::holds_alternative<DiscreteDist>(p) && std::holds_alternative<DiscreteDist>(q))
    return kl_discrete(std::get<DiscreteDist>(p), std::get<DiscreteDist>(q));
  if (std::holds_alternative<GaussianDist>(p) && std::holds_alternative<GaussianDist>(q))
    return kl_gaussian(std::get<GaussianDist>(p), std::get<GaussianDist>(q));
  throw std::invalid_argument("kl: mixed distribution families");
}

inline double kl_product(const ProductDist& p, const ProductDist& q) {
  require(p.power == q.power, "kl_product: powers differ");
  return tensorize_kl(kl_base(p.base, q.base), p.power);
}

}  // namespace minimaxq
