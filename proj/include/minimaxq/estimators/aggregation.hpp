#pragma once

#include <array>
#include <utility>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/loss.hpp"

namespace minimaxq {

// Returns a point within loss r of at least two of the three candidates.
// Candidates are tried first, then pairwise midpoints: if the truth is
// within r of two candidates, their midpoint is too (norm metric, g
// nondecreasing), so the selection set is never empty on that event and
// the output is within 2 A r of the truth.
inline Vector median_of_three(const std::array<Vector, 3>& c, double r, const LossModel& loss,
                              const Vector& fallback, bool try_midpoints = true) {
  require(r > 0.0, "median_of_three: r must be positive");
  auto votes = [&](const Vector& t) {
    int v = 0;
    for (const auto& x : c) v += loss(x, t) < r;
    return v;
  };
  for (const auto& x : c)
    if (votes(x) >= 2) return x;
  if (try_midpoints)
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Vector m = 0.5 * (c[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(j)]);
        if (votes(m) >= 2) return m;
      }
  return fallback;
}

// Likelihood-ratio rule between P1^n and P2^n: theta1 iff P1^n(x) >= P2^n(x).
class LikelihoodRatioRule {
 public:
  LikelihoodRatioRule(DiscreteDist P1, DiscreteDist P2, int n, Vector theta1, Vector theta2)
      : P1_(std::move(P1)), P2_(std::move(P2)), n_(n), theta1_(std::move(theta1)), theta2_(std::move(theta2)) {
    require(n_ >= 1, "lr_two_point: n must be >= 1");
    product_outcomes(merged_masses(P1_, P2_).size(), n_);
  }

  bool favors_first(const Dataset& x) const {
    require(x.rows() == n_, "lr_two_point: sample size mismatch");
    double l1 = 1.0, l2 = 1.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      Vector xi = x.row(i).transpose();
      l1 *= P1_.mass_at(xi);
      l2 *= P2_.mass_at(xi);
    }
    return l1 >= l2;
  }

  Vector operator()(const Dataset& x) const { return favors_first(x) ? theta1_ : theta2_; }

  // (P1^n(rule picks theta2), P2^n(rule picks theta1)) by full enumeration.
  std::pair<double, double> error_probabilities() const {
    const auto masses = merged_masses(P1_, P2_);
    const std::size_t k = masses.size();
    const std::size_t total = product_outcomes(k, n_);
    std::vector<std::size_t> digit(static_cast<std::size_t>(n_), 0);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      double p = 1.0, q = 1.0;
      for (auto d : digit) {
        p *= masses[d].first;
        q *= masses[d].second;
      }
      if (p >= q) e2 += q;
      else e1 += p;
      for (std::size_t j = 0; j < digit.size(); ++j) {
        if (++digit[j] < k) break;
        digit[j] = 0;
      }
    }
    return {e1, e2};
  }

  double average_error() const {
    auto [e1, e2] = error_probabilities();
    return 0.5 * (e1 + e2);
  }

  double worst_error() const {
    auto [e1, e2] = error_probabilities();
    return std::max(e1, e2);
  }

 private:
  DiscreteDist P1_, P2_;
  int n_;
  Vector theta1_, theta2_;
};

inline LikelihoodRatioRule lr_two_point(const DiscreteDist& P1, const DiscreteDist& P2, int n,
                                        const Vector& theta1, const Vector& theta2) {
  return LikelihoodRatioRule(P1, P2, n, theta1, theta2);
}

}  // namespace minimaxq
