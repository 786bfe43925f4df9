#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

// lambda_j = scale * sigma * sqrt(log(2d/j) / n), j = 1..d.
inline Vector slope_weights(Eigen::Index d, Eigen::Index n, double sigma, double scale = 6.0) {
  Vector lam(d);
  for (Eigen::Index j = 0; j < d; ++j)
    lam[j] = scale * sigma * std::sqrt(std::log(2.0 * static_cast<double>(d) / static_cast<double>(j + 1)) /
                                       static_cast<double>(n));
  return lam;
}

inline double sorted_l1_norm(const Vector& x, const Vector& lambda) {
  std::vector<double> a(x.data(), x.data() + x.size());
  for (auto& v : a) v = std::abs(v);
  std::sort(a.begin(), a.end(), std::greater<>());
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += lambda[static_cast<Eigen::Index>(j)] * a[j];
  return s;
}

// argmin_x 0.5 ||x - z||^2 + sum_j lambda_j |x|_(j), by a stack-based
// pooling pass on the sorted magnitudes.
inline Vector prox_sorted_l1(const Vector& z, const Vector& lambda) {
  const auto d = z.size();
  require(lambda.size() == d, "prox_sorted_l1: size mismatch");
  for (Eigen::Index j = 0; j < d; ++j) {
    require(lambda[j] >= 0.0, "prox_sorted_l1: negative weight");
    require(j == 0 || lambda[j] <= lambda[j - 1], "prox_sorted_l1: weights must be nonincreasing");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return std::abs(z[a]) > std::abs(z[b]); });

  struct Block {
    Eigen::Index start, end;
    double sum;
  };
  std::vector<Block> stack;
  for (Eigen::Index j = 0; j < d; ++j) {
    stack.push_back({j, j, std::abs(z[order[static_cast<std::size_t>(j)]]) - lambda[j]});
    while (stack.size() > 1) {
      auto& cur = stack.back();
      auto& prev = stack[stack.size() - 2];
      const double mean_cur = cur.sum / static_cast<double>(cur.end - cur.start + 1);
      const double mean_prev = prev.sum / static_cast<double>(prev.end - prev.start + 1);
      if (mean_prev > mean_cur) break;
      prev.sum += cur.sum;
      prev.end = cur.end;
      stack.pop_back();
    }
  }
  Vector x = Vector::Zero(d);
  for (const auto& b : stack) {
    const double v = std::max(b.sum / static_cast<double>(b.end - b.start + 1), 0.0);
    for (Eigen::Index j = b.start; j <= b.end; ++j) {
      const auto i = order[static_cast<std::size_t>(j)];
      x[i] = std::copysign(v, z[i]);
    }
  }
  return x;
}

struct SlopeOptions {
  double tol = 1e-10;
  int max_iter = 100000;
  bool record_objective = false;
};

struct SlopeResult {
  Vector theta;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

inline double top_eigenvalue_psd(const Matrix& G) {
  if (G.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
  return std::max(es.eigenvalues().maxCoeff(), 0.0);
}

// Gram matrix and step constant of a fixed design, reusable across responses.
struct SlopeDesign {
  Matrix X, G;
  double L = 0.0;

  explicit SlopeDesign(Matrix design) : X(std::move(design)) {
    G = X.transpose() * X / static_cast<double>(X.rows());
    // small margin so rounding in the eigensolver cannot make the step too long
    L = top_eigenvalue_psd(G) * (1.0 + 1e-12);
  }
};

// Proximal gradient for 0.5/n ||y - X theta||^2 + sum lambda_j |theta|_(j)
// with step 1/L. Returns the best iterate seen.
inline SlopeResult slope(const SlopeDesign& D, const Vector& y, const Vector& lambda, const SlopeOptions& opt = {}) {
  require(D.X.rows() == y.size() && D.X.cols() == lambda.size(), "slope: size mismatch");
  const double n = static_cast<double>(D.X.rows());
  const Matrix& G = D.G;
  const double L = D.L;
  const Vector b = D.X.transpose() * y / n;
  const double yy = y.squaredNorm() / (2.0 * n);

  auto objective = [&](const Vector& t) { return 0.5 * t.dot(G * t) - b.dot(t) + yy + sorted_l1_norm(t, lambda); };

  SlopeResult res;
  res.theta = Vector::Zero(D.X.cols());
  res.objective = objective(res.theta);
  if (opt.record_objective) res.trace.push_back(res.objective);
  if (L <= 0.0) {
    res.converged = true;
    return res;
  }
  Vector theta = res.theta;
  double prev = res.objective;
  for (int it = 1; it <= opt.max_iter; ++it) {
    theta = prox_sorted_l1(theta - (G * theta - b) / L, lambda / L);
    const double f = objective(theta);
    if (opt.record_objective) res.trace.push_back(f);
    res.iterations = it;
    if (f <= res.objective) {
      res.objective = f;
      res.theta = theta;
    }
    if (std::abs(prev - f) < opt.tol) {
      res.converged = true;
      break;
    }
    prev = f;
  }
  return res;
}

inline SlopeResult slope(const Matrix& X, const Vector& y, const Vector& lambda, const SlopeOptions& opt = {}) {
  return slope(SlopeDesign(X), y, lambda, opt);
}

inline SlopeResult slope(const Matrix& X, const Vector& y, double sigma, double weight_scale = 6.0,
                         const SlopeOptions& opt = {}) {
  require(sigma > 0.0 && weight_scale > 0.0, "slope: sigma and weight_scale must be positive");
  return slope(X, y, slope_weights(X.cols(), X.rows(), sigma, weight_scale), opt);
}

}  // namespace minimaxq
