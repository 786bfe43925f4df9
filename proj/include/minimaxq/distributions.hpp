#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

struct Atom {
  Vector point;
  double prob;
};

// Finite-support law. Atoms whose points agree after rounding to 1e-12 are
// merged, so support points are pairwise distinct.
class DiscreteDist {
 public:
  DiscreteDist() = default;

  explicit DiscreteDist(const std::vector<Atom>& atoms) {
    require(!atoms.empty(), "DiscreteDist: no atoms");
    std::map<std::vector<double>, std::size_t> index;
    double total = 0.0;
    for (const auto& a : atoms) {
      require(a.prob >= 0.0 && std::isfinite(a.prob), "DiscreteDist: negative probability");
      require(atoms_.empty() || a.point.size() == atoms_.front().point.size(),
              "DiscreteDist: mixed dimensions");
      total += a.prob;
      auto key = canonical(a.point);
      auto it = index.find(key);
      if (it == index.end()) {
        index.emplace(key, atoms_.size());
        atoms_.push_back(a);
      } else {
        atoms_[it->second].prob += a.prob;
      }
    }
    require(std::abs(total - 1.0) <= 1e-12, "DiscreteDist: probabilities do not sum to 1");
  }

  DiscreteDist(const std::vector<double>& scalar_points, const std::vector<double>& probs)
      : DiscreteDist(zip(scalar_points, probs)) {}

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  Eigen::Index dim() const { return atoms_.empty() ? 0 : atoms_.front().point.size(); }

  double mass_at(const Vector& x) const {
    auto key = canonical(x);
    for (const auto& a : atoms_)
      if (canonical(a.point) == key) return a.prob;
    return 0.0;
  }

  Vector mean() const {
    Vector m = Vector::Zero(dim());
    for (const auto& a : atoms_) m += a.prob * a.point;
    return m;
  }

  Vector sample(Rng& rng) const { return atoms_[sample_index(rng)].point; }

  std::size_t sample_index(Rng& rng) const {
    double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_[i].prob;
      if (u < acc) return i;
    }
    return atoms_.size() - 1;
  }

  static std::vector<double> canonical(const Vector& x) {
    std::vector<double> key(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double r = std::round(x[i] * 1e12) / 1e12;
      key[static_cast<std::size_t>(i)] = (r == 0.0) ? 0.0 : r;  // fold -0
    }
    return key;
  }

 private:
  static std::vector<Atom> zip(const std::vector<double>& xs, const std::vector<double>& ps) {
    require(xs.size() == ps.size(), "DiscreteDist: size mismatch");
    std::vector<Atom> out;
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back({Vector::Constant(1, xs[i]), ps[i]});
    return out;
  }

  std::vector<Atom> atoms_;
};

inline DiscreteDist bernoulli(double p) {
  require(p >= 0.0 && p <= 1.0, "bernoulli: p outside [0,1]");
  return DiscreteDist({0.0, 1.0}, {1.0 - p, p});
}

// Probabilities of p and q on their merged support, in a common order.
inline std::vector<std::pair<double, double>> merged_masses(const DiscreteDist& p,
                                                            const DiscreteDist& q) {
  std::map<std::vector<double>, std::pair<double, double>> m;
  for (const auto& a : p.atoms()) m[DiscreteDist::canonical(a.point)].first += a.prob;
  for (const auto& a : q.atoms()) m[DiscreteDist::canonical(a.point)].second += a.prob;
  std::vector<std::pair<double, double>> out;
  out.reserve(m.size());
  for (const auto& kv : m) out.push_back(kv.second);
  return out;
}

inline std::vector<Vector> merged_support(const DiscreteDist& p, const DiscreteDist& q) {
  std::map<std::vector<double>, Vector> m;
  for (const auto& a : p.atoms()) m.emplace(DiscreteDist::canonical(a.point), a.point);
  for (const auto& a : q.atoms()) m.emplace(DiscreteDist::canonical(a.point), a.point);
  std::vector<Vector> out;
  for (auto& kv : m) out.push_back(kv.second);
  return out;
}

class GaussianDist {
 public:
  GaussianDist(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    require(cov_.rows() == cov_.cols() && cov_.rows() == mean_.size(),
            "GaussianDist: dimension mismatch");
    require((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() <= 1e-10,
            "GaussianDist: covariance not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov_);
    require(es.eigenvalues().minCoeff() >= -1e-10, "GaussianDist: covariance not PSD");
    Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * root.asDiagonal();
  }

  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  Eigen::Index dim() const { return mean_.size(); }

  Vector sample(Rng& rng) const {
    Vector z(dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
    return mean_ + factor_ * z;
  }

  // Fills rows of `out` with i.i.d. draws.
  void sample_rows(Rng& rng, Eigen::Ref<Matrix> out) const {
    Matrix z(out.rows(), dim());
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = standard_normal(rng);
    out = z * factor_.transpose();
    out.rowwise() += mean_.transpose();
  }

  double log_density(const Vector& x) const {
    Eigen::LLT<Matrix> llt(cov_);
    if (llt.info() != Eigen::Success) throw std::domain_error("GaussianDist: singular covariance");
    Vector w = llt.matrixL().solve(x - mean_);
    double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * (w.squaredNorm() + logdet + static_cast<double>(dim()) * std::log(2.0 * M_PI));
  }

 private:
  Vector mean_;
  Matrix cov_;
  Matrix factor_;
};

using BaseDist = std::variant<DiscreteDist, GaussianDist>;

inline Vector sample_base(const BaseDist& d, Rng& rng) {
  return std::visit([&](const auto& x) { return x.sample(rng); }, d);
}

struct MixtureDist {
  std::vector<double> weights;
  std::vector<BaseDist> components;

  Vector sample(Rng& rng) const {
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    return sample_base(components[pick(rng)], rng);
  }
};

// n-fold product of a base law; samples are stacked coordinates of n draws.
struct ProductDist {
  BaseDist base;
  int power = 1;

  ProductDist(BaseDist b, int n) : base(std::move(b)), power(n) {
    require(n >= 1, "ProductDist: power must be >= 1");
  }

  Vector sample(Rng& rng) const {
    std::vector<Vector> draws;
    Eigen::Index d = 0;
    for (int i = 0; i < power; ++i) {
      draws.push_back(sample_base(base, rng));
      d = draws.back().size();
    }
    Vector out(d * power);
    for (int i = 0; i < power; ++i) out.segment(i * d, d) = draws[static_cast<std::size_t>(i)];
    return out;
  }
};

using Distribution = std::variant<DiscreteDist, GaussianDist, MixtureDist, ProductDist>;

inline Vector sample(const Distribution& d, Rng& rng) {
  return std::visit([&](const auto& x) { return x.sample(rng); }, d);
}

}  // namespace minimaxq
