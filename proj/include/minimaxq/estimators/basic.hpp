#pragma once

#include <algorithm>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

inline Vector sample_mean(const Dataset& data) {
  require(data.rows() >= 1, "sample_mean: empty data");
  return data.colwise().mean().transpose();
}

inline double median_of(std::vector<double> v) {
  require(!v.empty(), "median_of: empty input");
  const std::size_t k = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k / 2), v.end());
  const double hi = v[k / 2];
  if (k % 2) return hi;
  return 0.5 * (*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k / 2)) + hi);
}

// Contiguous blocks of floor(n/k) samples; leftovers are dropped.
inline double median_of_means(const Dataset& data, int k) {
  require(data.cols() == 1, "median_of_means: scalar data expected");
  const auto n = data.rows();
  require(k >= 1 && k <= n, "median_of_means: need 1 <= k <= n");
  const auto b = n / k;
  std::vector<double> means(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) means[static_cast<std::size_t>(j)] = data.col(0).segment(j * b, b).mean();
  return median_of(std::move(means));
}

// Uncentered second moment; the models are mean zero.
inline Matrix sample_covariance(const Dataset& data) {
  require(data.rows() >= 1, "sample_covariance: empty data");
  Matrix S = Matrix::Zero(data.cols(), data.cols());
  S.selfadjointView<Eigen::Lower>().rankUpdate(data.transpose(), 1.0 / static_cast<double>(data.rows()));
  return S.selfadjointView<Eigen::Lower>();
}

inline Matrix zero_covariance(Eigen::Index d) { return Matrix::Zero(d, d); }

// Pool adjacent violators: L2 projection onto nondecreasing sequences.
inline Vector pava(const Vector& y, const Vector* weights = nullptr) {
  const auto n = y.size();
  std::vector<double> level, weight;
  std::vector<Eigen::Index> count;
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = weights ? (*weights)[i] : 1.0;
    level.push_back(y[i]);
    weight.push_back(w);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const double w2 = weight.back(), l2 = level.back();
      const auto c2 = count.back();
      level.pop_back();
      weight.pop_back();
      count.pop_back();
      const double wsum = weight.back() + w2;
      level.back() = (weight.back() * level.back() + w2 * l2) / wsum;
      weight.back() = wsum;
      count.back() += c2;
    }
  }
  Vector out(n);
  Eigen::Index pos = 0;
  for (std::size_t b = 0; b < level.size(); ++b)
    for (Eigen::Index j = 0; j < count[b]; ++j) out[pos++] = level[b];
  return out;
}

inline Vector isotonic_clipped(const Vector& y) {
  require(y.size() >= 1, "isotonic_clipped: empty input");
  return pava(y).cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace minimaxq
