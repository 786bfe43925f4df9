#pragma once

#include <map>
#include <string>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

enum class EstimatorKind {
  sample_mean,
  median_of_means,
  sample_cov,
  zero_cov,
  isotonic_clipped,
  slope,
  kde_fixed,
  kde_lepski,
  clipped_sgd,
  lr_two_point,
  median_of_three
};

inline const std::vector<std::pair<EstimatorKind, std::string>>& estimator_names() {
  static const std::vector<std::pair<EstimatorKind, std::string>> names = {
      {EstimatorKind::sample_mean, "sample_mean"},
      {EstimatorKind::median_of_means, "median_of_means"},
      {EstimatorKind::sample_cov, "sample_cov"},
      {EstimatorKind::zero_cov, "zero_cov"},
      {EstimatorKind::isotonic_clipped, "isotonic_clipped"},
      {EstimatorKind::slope, "slope"},
      {EstimatorKind::kde_fixed, "kde_fixed"},
      {EstimatorKind::kde_lepski, "kde_lepski"},
      {EstimatorKind::clipped_sgd, "clipped_sgd"},
      {EstimatorKind::lr_two_point, "lr_two_point"},
      {EstimatorKind::median_of_three, "median_of_three"}};
  return names;
}

inline std::string to_string(EstimatorKind k) {
  for (const auto& [kind, name] : estimator_names())
    if (kind == k) return name;
  return "unknown";
}

inline EstimatorKind parse_estimator_kind(const std::string& s) {
  for (const auto& [kind, name] : estimator_names())
    if (name == s) return kind;
  throw std::invalid_argument("unknown estimator: " + s);
}

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::sample_mean;
  std::map<std::string, double> params;

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  std::string name() const { return to_string(kind); }
};

}  // namespace minimaxq
