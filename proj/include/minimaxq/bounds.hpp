#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "minimaxq/divergences.hpp"
#include "minimaxq/loss.hpp"

namespace minimaxq {

enum class Method { le_cam, le_cam_kl, fano, risk_to_quantile, boosted, huber_modulus };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::le_cam: return "le_cam";
    case Method::le_cam_kl: return "le_cam_kl";
    case Method::fano: return "fano";
    case Method::risk_to_quantile: return "risk_to_quantile";
    case Method::boosted: return "boosted";
    case Method::huber_modulus: return "huber_modulus";
  }
  return "unknown";
}

// Lower bound on the lower minimax quantile, valid for every delta below
// delta_max (or equal to it when inclusive).
struct BoundCertificate {
  double value = 0.0;
  double delta_max = 0.5;
  bool inclusive = false;
  Method method = Method::le_cam;
  std::string note;

  bool valid_at(double delta) const {
    return delta > 0.0 && (inclusive ? delta <= delta_max : delta < delta_max);
  }
};

inline void require_delta_half(double delta, const char* who) {
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument(std::string(who) + ": delta must lie in (0, 1/2)");
}

inline double le_cam_kl_threshold(double delta) { return std::log(1.0 / (4.0 * delta * (1.0 - delta))); }

inline std::optional<BoundCertificate> le_cam_quantile_lb(double tv, double eta, const Transform& g,
                                                          double delta) {
  require_delta_half(delta, "le_cam_quantile_lb");
  require(tv >= 0.0 && tv <= 1.0, "le_cam_quantile_lb: tv outside [0,1]");
  require(eta >= 0.0, "le_cam_quantile_lb: negative eta");
  if (!(tv < 1.0 - 2.0 * delta)) return std::nullopt;
  // M_- is nonincreasing in delta, so the bound holds for every smaller level too.
  return BoundCertificate{g(eta), delta, true, Method::le_cam, "two-point, TV < 1 - 2 delta"};
}

inline std::optional<BoundCertificate> le_cam_kl_quantile_lb(double kl, double eta, const Transform& g,
                                                             double delta) {
  require_delta_half(delta, "le_cam_kl_quantile_lb");
  require(kl >= 0.0, "le_cam_kl_quantile_lb: negative divergence");
  require(eta >= 0.0, "le_cam_kl_quantile_lb: negative eta");
  if (!(kl < le_cam_kl_threshold(delta))) return std::nullopt;
  return BoundCertificate{g(eta), delta, true, Method::le_cam_kl,
                          "two-point, KL < log(1/(4 delta (1 - delta)))"};
}

inline double fano_ratio(const std::vector<double>& kls_to_Q) {
  require(kls_to_Q.size() >= 2, "fano: need at least two hypotheses");
  const double M = static_cast<double>(kls_to_Q.size());
  double mean = std::accumulate(kls_to_Q.begin(), kls_to_Q.end(), 0.0) / M;
  return (mean + std::log(2.0 - 1.0 / M)) / std::log(M);
}

inline std::optional<BoundCertificate> fano_quantile_lb(const std::vector<double>& kls_to_Q, double eta,
                                                        const Transform& g) {
  const double rho = fano_ratio(kls_to_Q);
  if (!(rho < 1.0)) return std::nullopt;
  return BoundCertificate{g(eta), 1.0 - rho, false, Method::fano,
                          "multi-hypothesis, delta < 1 - rho"};
}

inline std::optional<BoundCertificate> risk_to_quantile(double Delta, double D, const Transform& g,
                                                        double epsilon) {
  require(epsilon > 0.0, "risk_to_quantile: epsilon must be positive");
  if (!(g(D) > 0.0)) throw std::domain_error("risk_to_quantile: g(D) = 0");
  const double value = g(epsilon * D);
  const double dmax = (Delta - value) / g((1.0 + epsilon) * D);
  if (!(dmax > 0.0)) return std::nullopt;
  return BoundCertificate{value, std::min(dmax, 1.0), false, Method::risk_to_quantile,
                          "risk lower bound with bounded diameter"};
}

// Same reduction when only D_lo <= D <= D_hi is known: the value uses D_lo,
// the validity range uses D_hi (the range shrinks as D grows).
inline std::optional<BoundCertificate> risk_to_quantile_range(double Delta, double D_lo, double D_hi,
                                                              const Transform& g, double epsilon) {
  require(D_lo <= D_hi, "risk_to_quantile_range: empty diameter range");
  auto at_hi = risk_to_quantile(Delta, D_hi, g, epsilon);
  if (!at_hi) return std::nullopt;
  at_hi->value = g(epsilon * D_lo);
  return at_hi;
}

inline double boost_h(double x) {
  require(x >= 0.0 && x <= 1.0, "boost_h: x outside [0,1]");
  return x * x * x + 3.0 * x * x * (1.0 - x);
}

inline int boost_find_k(double delta_minus, double delta_plus) {
  require(delta_minus > 0.0 && delta_minus < delta_plus && delta_plus < 0.5,
          "boost_find_k: need 0 < delta_minus < delta_plus < 1/2");
  double x = delta_plus;
  for (int k = 1; k <= 10000; ++k) {
    x = boost_h(x);
    if (x <= delta_minus) return k;
  }
  throw std::runtime_error("boost_find_k: no convergence");
}

inline double boost_quantile_lb(double lb_at_delta_minus, double A, int k) {
  require(lb_at_delta_minus >= 0.0, "boost_quantile_lb: negative bound");
  require(A > 0.0, "boost_quantile_lb: A must be positive");
  require(k >= 1, "boost_quantile_lb: k must be >= 1");
  return lb_at_delta_minus / std::pow(2.0 * A, k);
}

// Boosts a certificate for the 3^k-fold product model at delta_minus to a
// certificate valid up to delta_plus. The caller must have built `base`
// with 3^k times the sample budget.
inline BoundCertificate boost_certificate(const BoundCertificate& base, double delta_minus,
                                          double delta_plus, double A) {
  require(base.valid_at(delta_minus), "boost_certificate: base bound not valid at delta_minus");
  const int k = boost_find_k(delta_minus, delta_plus);
  return BoundCertificate{boost_quantile_lb(base.value, A, k), delta_plus, true, Method::boosted,
                          "boosted with k = " + std::to_string(k) + " from " + to_string(base.method)};
}

inline int boost_product_power(int k) {
  int p = 1;
  for (int i = 0; i < k; ++i) p *= 3;
  return p;
}

inline double quantile_to_risk_lb(double quantile_lb, double delta) {
  require(quantile_lb >= 0.0, "quantile_to_risk_lb: negative bound");
  require(delta > 0.0 && delta <= 1.0, "quantile_to_risk_lb: delta outside (0,1]");
  return delta * quantile_lb;
}

inline double le_cam_risk_lb(double tv, double eta, const Transform& g) {
  require(tv >= 0.0 && tv <= 1.0, "le_cam_risk_lb: tv outside [0,1]");
  return g(eta) * (1.0 - tv) / 2.0;
}

inline double fano_risk_lb(const std::vector<double>& kls_to_Q, double eta, const Transform& g) {
  return g(eta) * std::max(0.0, 1.0 - fano_ratio(kls_to_Q));
}

inline double assouad_risk_lb(const std::vector<double>& alphas, double max_tv_adjacent, const Transform& g,
                              double A) {
  require(max_tv_adjacent >= 0.0 && max_tv_adjacent <= 1.0, "assouad_risk_lb: tv outside [0,1]");
  require(A > 0.0, "assouad_risk_lb: A must be positive");
  double sum = 0.0;
  for (double a : alphas) sum += g(a);
  return (1.0 - max_tv_adjacent) * sum / (2.0 * A);
}

inline std::optional<BoundCertificate> huber_modulus_lb(const Vector& theta1, const Vector& theta2,
                                                        double tv_core, double epsilon,
                                                        const LossModel& loss) {
  require(epsilon >= 0.0 && epsilon < 1.0, "huber_modulus_lb: epsilon outside [0,1)");
  if (!(tv_core <= epsilon / (1.0 - epsilon))) return std::nullopt;
  return BoundCertificate{loss.g()(loss.distance(theta1, theta2) / 2.0), 0.5, false,
                          Method::huber_modulus, "contaminated laws coincide"};
}

struct MixtureWitnesses {
  DiscreteDist Q1, Q2;
  double eps_prime = 0.0;
};

// (1 - eps) R + eps Q.
inline DiscreteDist contaminate(const DiscreteDist& R, const DiscreteDist& Q, double eps) {
  std::vector<Atom> atoms;
  for (const auto& a : R.atoms()) atoms.push_back({a.point, (1.0 - eps) * a.prob});
  for (const auto& a : Q.atoms()) atoms.push_back({a.point, eps * a.prob});
  double total = 0.0;
  for (const auto& a : atoms) total += a.prob;
  for (auto& a : atoms) a.prob /= total;
  return DiscreteDist(atoms);
}

inline MixtureWitnesses huber_mixture_witnesses(const DiscreteDist& R1, const DiscreteDist& R2) {
  auto support = merged_support(R1, R2);
  auto masses = merged_masses(R1, R2);
  double pos = 0.0, neg = 0.0;
  for (const auto& [r1, r2] : masses) {
    pos += std::max(r2 - r1, 0.0);
    neg += std::max(r1 - r2, 0.0);
  }
  const double tv = 0.5 * (pos + neg);
  if (tv <= 0.0) return {R1, R1, 0.0};

  std::vector<Atom> q1, q2;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const auto [r1, r2] = masses[i];
    if (r2 > r1) q1.push_back({support[i], (r2 - r1) / pos});
    if (r1 > r2) q2.push_back({support[i], (r1 - r2) / neg});
  }
  return {DiscreteDist(q1), DiscreteDist(q2), tv / (1.0 + tv)};
}

inline std::optional<double> matrix_bernstein_cov_bound(double op_norm, double eff_rank, int n, int d,
                                                        double delta) {
  require(op_norm > 0.0 && eff_rank >= 1.0 && n >= 1 && d >= 1, "matrix_bernstein_cov_bound: bad input");
  require(delta > 0.0 && delta <= 1.0, "matrix_bernstein_cov_bound: delta outside (0,1]");
  const double q = eff_rank * (std::log(1.0 / delta) + std::log(8.0 * d)) / n;
  if (q > 1.0) return std::nullopt;
  return 513.0 * op_norm * std::sqrt(q);
}

}  // namespace minimaxq
