#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "minimaxq/core.hpp"

namespace minimaxq {

inline double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// Compactly supported symmetric kernels normalized to integrate to 1.
class Kernel {
 public:
  enum class Kind { epanechnikov, bump };

  static Kernel epanechnikov() {
    Kernel k(Kind::epanechnikov, 1.0);
    k.norm_ = 1.0 / integrate([](double u) { return 1.0 - u * u; }, -1.0, 1.0);
    k.finish();
    return k;
  }

  // proportional to exp(-1/(1 - 4x^2)) on (-1/2, 1/2)
  static Kernel bump() {
    Kernel k(Kind::bump, 0.5);
    k.norm_ = 1.0 / integrate([](double x) { return raw_bump(x); }, -0.5, 0.5);
    k.finish();
    return k;
  }

  double operator()(double u) const {
    switch (kind_) {
      case Kind::epanechnikov: return std::abs(u) <= 1.0 ? norm_ * (1.0 - u * u) : 0.0;
      case Kind::bump: return norm_ * raw_bump(u);
    }
    return 0.0;
  }

  double derivative(double u) const {
    switch (kind_) {
      case Kind::epanechnikov: return std::abs(u) < 1.0 ? -2.0 * norm_ * u : 0.0;
      case Kind::bump: {
        if (std::abs(u) >= 0.5) return 0.0;
        const double s = 1.0 - 4.0 * u * u;
        return norm_ * raw_bump(u) * (-8.0 * u / (s * s));
      }
    }
    return 0.0;
  }

  Kind kind() const { return kind_; }
  double half_width() const { return half_width_; }
  double sup() const { return (*this)(0.0); }
  double roughness() const { return R_; }

  // integral of |u|^beta |K(u)|
  double moment(double beta) const {
    return integrate([&](double u) { return std::pow(std::abs(u), beta) * std::abs((*this)(u)); }, -half_width_,
                     half_width_);
  }

  // sup over pairs of a 10^4-point grid of |K^(m)(x) - K^(m)(x')| / |x - x'|^(beta - m),
  // m = ceil(beta) - 1. Cached per (kind, beta).
  double holder_norm(double beta) const {
    require(beta > 0.0 && beta <= 2.0, "Kernel::holder_norm: beta outside (0,2]");
    static std::mutex mu;
    static std::map<std::pair<int, double>, double> cache;
    const auto key = std::make_pair(static_cast<int>(kind_), beta);
    {
      std::lock_guard<std::mutex> lock(mu);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const int m = static_cast<int>(std::ceil(beta)) - 1;
    const double e = beta - m;
    const int N = 10000;
    // the grid covers the support plus a margin so pairs straddling the edge count
    const double a = -1.25 * half_width_, b = 1.25 * half_width_, step = (b - a) / (N - 1);
    std::vector<double> f(N);
    for (int i = 0; i < N; ++i) f[i] = m == 0 ? (*this)(a + i * step) : derivative(a + i * step);
    double best = 0.0;
    if (e == 1.0) {
      // chord slopes are averages of adjacent slopes
      for (int i = 0; i + 1 < N; ++i) best = std::max(best, std::abs(f[i + 1] - f[i]) / step);
    } else {
      std::vector<double> denom(N);
      for (int g = 1; g < N; ++g) denom[g] = std::pow(g * step, e);
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j) best = std::max(best, std::abs(f[j] - f[i]) / denom[j - i]);
    }
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = best;
    return best;
  }

 private:
  Kernel(Kind k, double hw) : kind_(k), half_width_(hw) {}

  static double raw_bump(double x) {
    const double s = 1.0 - 4.0 * x * x;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
  }

  void finish() {
    R_ = integrate([&](double u) { return (*this)(u) * (*this)(u); }, -half_width_, half_width_);
  }

  Kind kind_;
  double half_width_;
  double norm_ = 1.0;
  double R_ = 0.0;
};

// Distances |X_i - x0| in ascending order with running sums of squares, so
// a compact-kernel estimate only touches the points inside the window.
class SortedDistances {
 public:
  SortedDistances(const Vector& x, double x0) : d_(static_cast<std::size_t>(x.size())) {
    for (Eigen::Index i = 0; i < x.size(); ++i) d_[static_cast<std::size_t>(i)] = std::abs(x[i] - x0);
    std::sort(d_.begin(), d_.end());
    sq_.resize(d_.size() + 1, 0.0);
    for (std::size_t i = 0; i < d_.size(); ++i) sq_[i + 1] = sq_[i] + d_[i] * d_[i];
  }

  double kde(const Kernel& K, double h) const {
    const double n = static_cast<double>(d_.size());
    const double w = K.half_width() * h;
    const auto m = static_cast<std::size_t>(std::upper_bound(d_.begin(), d_.end(), w) - d_.begin());
    if (K.kind() == Kernel::Kind::epanechnikov) {
      const double c = K.sup();
      return c * (static_cast<double>(m) - sq_[m] / (h * h)) / (n * h);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += K(d_[i] / h);
    return s / (n * h);
  }

 private:
  std::vector<double> d_, sq_;
};

inline double kde_point(const Vector& x, double x0, double h, const Kernel& K) {
  require(h > 0.0, "kde_point: bandwidth must be positive");
  require(x.size() >= 1, "kde_point: empty data");
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += K((x[i] - x0) / h);
  return s / (static_cast<double>(x.size()) * h);
}

// Constants of the fixed-bandwidth KDE bound for a kernel of order ceil(beta).
struct KdeConstants {
  double beta = 1.0, C1 = 1.0, C2 = 0.0, C = 0.0, c = 0.0;
};

// sup-norm factor of a Hoelder density, valid for beta in (0,1]; beyond 1
// the beta = 1 value is used unless the caller supplies one.
inline double holder_sup_constant(double beta) {
  const double b = std::min(beta, 1.0);
  return std::pow((b + 1.0) / (2.0 * b), b / (b + 1.0));
}

inline KdeConstants kde_constants(double beta, const Kernel& K, double C1_override = 0.0) {
  require(beta > 0.0 && beta <= 2.0, "kde_constants: beta outside (0,2]");
  KdeConstants k;
  k.beta = beta;
  k.C1 = C1_override > 0.0 ? C1_override : holder_sup_constant(beta);
  const double fact = 1.0;  // (ceil(beta) - 1)! for beta <= 2
  const double R = K.roughness(), mu = K.moment(beta), sup = K.sup();
  k.C2 = std::pow(k.C1 * R * fact * fact / (mu * mu), 1.0 / (2.0 * beta + 1.0));
  const double a = 2.0 * std::sqrt(2.0 * k.C1 * R / k.C2) + mu * std::pow(k.C2, beta) / fact;
  k.C = a * a;
  k.c = std::pow(18.0 * k.C1 * k.C2 * R / (sup * sup), (2.0 * beta + 1.0) / (2.0 * beta));
  return k;
}

// h = C2 gamma^{-1/(beta+1)} (log(2/delta)/n)^{1/(2beta+1)}
inline double kde_bandwidth(const KdeConstants& k, double gamma, double n, double log2_over_delta) {
  return k.C2 * std::pow(gamma, -1.0 / (k.beta + 1.0)) * std::pow(log2_over_delta / n, 1.0 / (2.0 * k.beta + 1.0));
}

struct LepskiResult {
  double estimate = 0.0;
  long k_hat = 0;       // 0 when no interval was formed
  long k_plus = 0;
  long evaluated = 0;   // intervals built before the tail became inert
};

inline LepskiResult lepski_kde_detail(const Vector& x, double x0, double gamma, const Kernel& K,
                                      const KdeConstants& k) {
  require(gamma > 0.0, "lepski_kde: gamma must be positive");
  require(x.size() >= 1, "lepski_kde: empty data");
  const double beta = k.beta;
  const double n = static_cast<double>(x.size());
  const double g = std::pow(gamma, 1.0 / (beta + 1.0));
  const double cap = k.C1 * g;
  LepskiResult res;
  if (n <= 3.0 * std::log(2.0) / k.c) return res;
  const double kp = std::floor(k.c * n / std::log(2.0) - 1.0);
  res.k_plus = static_cast<long>(std::min(kp, 1e15));
  if (res.k_plus < 1) return res;

  const SortedDistances sd(x, x0);
  std::vector<double> lo, hi;
  double max_lo = 0.0;
  // Once sup K / h_j <= radius_j and the radius clears every lower end seen
  // so far, every later interval contains [0, radius_j] and cannot change the
  // clipped answer.
  for (long j = 1; j <= res.k_plus; ++j) {
    const double L = static_cast<double>(j + 1) * std::log(2.0);
    const double h = kde_bandwidth(k, gamma, n, L);
    const double rad = std::sqrt(k.C) * g * std::pow(L / n, beta / (2.0 * beta + 1.0));
    if (K.sup() / h <= rad && rad >= max_lo) break;
    const double f = sd.kde(K, h);
    lo.push_back(f - rad);
    hi.push_back(f + rad);
    max_lo = std::max(max_lo, f - rad);
  }
  res.evaluated = static_cast<long>(lo.size());

  double a = -std::numeric_limits<double>::infinity(), b = std::numeric_limits<double>::infinity();
  long k_hat = res.evaluated + 1;
  for (long j = res.evaluated; j >= 1; --j) {
    const double na = std::max(a, lo[static_cast<std::size_t>(j - 1)]);
    const double nb = std::min(b, hi[static_cast<std::size_t>(j - 1)]);
    if (na > nb) break;
    a = na;
    b = nb;
    k_hat = j;
  }
  res.k_hat = std::min(k_hat, res.k_plus);
  res.estimate = std::clamp(a, 0.0, cap);
  return res;
}

inline double lepski_kde(const Vector& x, double x0, double beta, double gamma, const Kernel& K,
                         double C1_override = 0.0) {
  return lepski_kde_detail(x, x0, gamma, K, kde_constants(beta, K, C1_override)).estimate;
}

}  // namespace minimaxq
