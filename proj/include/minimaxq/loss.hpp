#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "minimaxq/core.hpp"

namespace minimaxq {

// Nondecreasing map g : [0, inf) -> [0, inf) applied to a distance.
class Transform {
 public:
  enum class Kind { identity, square, threshold, table };

  static Transform identity() { return Transform(Kind::identity, 1.0); }
  // scale * x^2
  static Transform square(double scale = 1.0) {
    require(scale > 0.0, "Transform::square: scale must be positive");
    return Transform(Kind::square, scale);
  }
  // 1{x > t}, strict.
  static Transform threshold(double t) {
    require(t >= 0.0, "Transform::threshold: negative level");
    return Transform(Kind::threshold, t);
  }
  // Piecewise linear through (xs, ys), flat outside the table.
  static Transform table(std::vector<double> xs, std::vector<double> ys) {
    require(xs.size() == ys.size() && !xs.empty(), "Transform::table: bad table");
    for (std::size_t i = 1; i < xs.size(); ++i)
      require(xs[i] > xs[i - 1] && ys[i] >= ys[i - 1], "Transform::table: not increasing");
    Transform t(Kind::table, 0.0);
    t.xs_ = std::move(xs);
    t.ys_ = std::move(ys);
    return t;
  }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::identity:
        return x;
      case Kind::square:
        return param_ * x * x;
      case Kind::threshold:
        return x > param_ ? 1.0 : 0.0;
      case Kind::table: {
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs_.begin());
        double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
        return ys_[i - 1] + w * (ys_[i] - ys_[i - 1]);
      }
    }
    return x;
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }

  // Quasi-triangle constant for a metric composed with this transform.
  double default_A() const { return kind_ == Kind::square ? 2.0 : 1.0; }

  std::string describe() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::identity: os << "identity"; break;
      case Kind::square: os << (param_ == 1.0 ? "square" : "scaled square"); break;
      case Kind::threshold: os << "threshold(" << param_ << ")"; break;
      case Kind::table: os << "table"; break;
    }
    return os.str();
  }

 private:
  Transform(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
  std::vector<double> xs_, ys_;
};

enum class Metric { euclidean, linf, operator_norm, design_seminorm, scalar_abs };

// L(a, b) = g(d(a, b)). Operator-norm parameters are d*d vectors holding a
// column-major matrix.
class LossModel {
 public:
  LossModel(Metric metric, Transform g, double A = 0.0,
            std::shared_ptr<const Matrix> design = nullptr)
      : metric_(metric), g_(std::move(g)), A_(A > 0.0 ? A : g_.default_A()),
        design_(std::move(design)) {
    require(metric_ != Metric::design_seminorm || design_, "LossModel: design matrix missing");
  }

  double distance(const Vector& a, const Vector& b) const {
    require(a.size() == b.size(), "LossModel: parameter size mismatch");
    Vector diff = a - b;
    switch (metric_) {
      case Metric::euclidean:
        return diff.norm();
      case Metric::linf:
        return diff.size() ? diff.cwiseAbs().maxCoeff() : 0.0;
      case Metric::scalar_abs:
        require(diff.size() == 1, "LossModel: scalar metric on a vector");
        return std::abs(diff[0]);
      case Metric::operator_norm:
        return operator_norm(diff);
      case Metric::design_seminorm:
        return (*design_ * diff).norm() / std::sqrt(static_cast<double>(design_->rows()));
    }
    return 0.0;
  }

  double operator()(const Vector& a, const Vector& b) const { return g_(distance(a, b)); }

  Metric metric() const { return metric_; }
  const Transform& g() const { return g_; }
  double A() const { return A_; }
  const std::shared_ptr<const Matrix>& design() const { return design_; }

  static double operator_norm(const Vector& flat) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    require(d * d == flat.size(), "LossModel: operator norm needs a square matrix");
    Eigen::Map<const Matrix> M(flat.data(), d, d);
    if ((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + M.cwiseAbs().maxCoeff())) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
  }

 private:
  Metric metric_;
  Transform g_;
  double A_;
  std::shared_ptr<const Matrix> design_;
};

inline Vector flatten(const Matrix& M) { return Eigen::Map<const Vector>(M.data(), M.size()); }

inline Matrix unflatten(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  require(d * d == v.size(), "unflatten: not a square matrix");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

}  // namespace minimaxq
