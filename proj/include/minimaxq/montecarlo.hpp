#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "minimaxq/distributions.hpp"
#include "minimaxq/loss.hpp"
#include "minimaxq/problems/instance.hpp"

namespace minimaxq {

// Confidence level of the DKW band around every reported quantile.
inline constexpr double kDkwAlpha = 0.01;

struct QuantileEstimate {
  double delta = 0.0;
  double value = 0.0;
  std::size_t reps = 0;
  double dkw_lo = 0.0, dkw_hi = 0.0;
};

// 1-based order statistic index ceil(q N), clamped to [1, N]. The slack
// keeps products like 0.99 * 100000 from rounding up past the integer.
inline std::size_t order_index(double q, std::size_t N) {
  const double k = std::ceil(q * static_cast<double>(N) - 1e-9);
  if (!(k >= 1.0)) return 1;
  return std::min(N, static_cast<std::size_t>(k));
}

inline QuantileEstimate quantile_from_sorted(const std::vector<double>& sorted, double delta,
                                             double alpha = kDkwAlpha) {
  require(!sorted.empty(), "empirical_quantile: empty losses");
  require(delta > 0.0 && delta <= 1.0, "empirical_quantile: delta outside (0,1]");
  const std::size_t N = sorted.size();
  const double eta = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(N)));
  QuantileEstimate q;
  q.delta = delta;
  q.reps = N;
  q.value = sorted[order_index(1.0 - delta, N) - 1];
  q.dkw_lo = sorted[order_index(1.0 - delta - eta, N) - 1];
  q.dkw_hi = sorted[order_index(1.0 - delta + eta, N) - 1];
  return q;
}

// (1 - delta) quantile as the ceil((1 - delta) N) order statistic, with the
// DKW band at ceil((1 - delta -/+ eta) N), eta = sqrt(log(2/alpha)/(2N)).
inline QuantileEstimate empirical_quantile(std::vector<double> losses, double delta, double alpha = kDkwAlpha) {
  require(!losses.empty(), "empirical_quantile: empty losses");
  std::sort(losses.begin(), losses.end());
  return quantile_from_sorted(losses, delta, alpha);
}

struct ExperimentResult {
  std::string problem;
  std::size_t hypothesis = 0;
  EstimatorSpec estimator;
  int n = 0;
  std::vector<double> losses;  // indexed by replication
  std::vector<QuantileEstimate> quantiles;
  std::uint64_t seed = 0;
};

// Calls body(r) for r in [0, count) on up to `threads` workers. The first
// exception thrown by any call is rethrown here.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= count) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Replication r of hypothesis h draws from make_stream(seed, h, r), so the
// losses do not depend on the thread count.
inline std::vector<ExperimentResult> run_experiment(const ProblemInstance& problem, const EstimatorSpec& spec,
                                                    std::size_t reps, const std::vector<double>& deltas,
                                                    std::uint64_t seed, unsigned threads = 1,
                                                    std::optional<std::vector<std::size_t>> hypotheses = std::nullopt) {
  require(reps >= 1, "run_experiment: reps must be >= 1");
  require(problem.supports(spec.kind), "problem " + problem.name + " does not support estimator " + spec.name());
  for (double d : deltas) require(d > 0.0 && d <= 1.0, "run_experiment: delta outside (0,1]");
  const auto hs = hypotheses.value_or(problem.simulated_hypotheses());
  std::vector<ExperimentResult> out;
  for (std::size_t h : hs) {
    require(h < problem.hypotheses.size(), "run_experiment: hypothesis index out of range");
    ExperimentResult res;
    res.problem = problem.name;
    res.hypothesis = h;
    res.estimator = spec;
    res.n = problem.n;
    res.seed = seed;
    res.losses.assign(reps, 0.0);
    parallel_for(reps, threads, [&](std::size_t r) {
      Rng rng = make_stream(seed, h, r);
      const Dataset data = problem.sample(h, rng);
      const double loss = problem.evaluate(problem.estimator(spec, data), h);
      require(std::isfinite(loss) && loss >= 0.0, "run_experiment: loss is negative or not finite");
      res.losses[r] = loss;
    });
    std::vector<double> sorted = res.losses;
    std::sort(sorted.begin(), sorted.end());
    for (double d : deltas) res.quantiles.push_back(quantile_from_sorted(sorted, d));
    out.push_back(std::move(res));
  }
  return out;
}

struct SandwichVerdict {
  bool pass = true;
  bool lower_ok = true, upper_ok = true;
  // dkw_hi - lb and ub - dkw_lo; nullopt when the bound is absent
  std::optional<double> lower_margin, upper_margin;
};

// PASS iff lb <= dkw_hi and (ub absent or dkw_lo <= ub).
inline SandwichVerdict sandwich_check(std::optional<double> lb, const QuantileEstimate& emp, std::optional<double> ub) {
  SandwichVerdict v;
  if (lb) {
    v.lower_margin = emp.dkw_hi - *lb;
    v.lower_ok = *lb <= emp.dkw_hi;
  }
  if (ub) {
    v.upper_margin = *ub - emp.dkw_lo;
    v.upper_ok = emp.dkw_lo <= *ub;
  }
  v.pass = v.lower_ok && v.upper_ok;
  return v;
}

struct MinimaxValues {
  double M = 0.0;        // minimax (1 - delta) quantile
  double M_minus = 0.0;  // lower minimax (1 - delta) quantile
  std::size_t estimators = 0;
};

inline constexpr std::size_t kBruteForceMaxEstimators = 10000000;

// Exact minimax quantiles over the deterministic estimators that map each
// outcome of the n-sample into theta_grid. The hypotheses are P1 with
// parameter theta_grid[0] and P2 with theta_grid[1]. Probability comparisons
// allow 1e-12 of rounding.
inline MinimaxValues brute_force_minimax(const DiscreteDist& P1, const DiscreteDist& P2, int n,
                                         const std::vector<Vector>& theta_grid, const LossModel& loss,
                                         double delta) {
  require(n >= 1 && n <= 4, "brute_force_minimax: n must lie in [1, 4]");
  require(theta_grid.size() >= 2, "brute_force_minimax: grid needs both hypothesis parameters");
  require(delta > 0.0 && delta <= 1.0, "brute_force_minimax: delta outside (0,1]");
  constexpr double tol = 1e-12;
  const auto masses = merged_masses(P1, P2);
  const std::size_t k = masses.size(), m = theta_grid.size();

  std::size_t outcomes = 1;
  for (int i = 0; i < n; ++i) outcomes *= k;
  double count = 1.0;
  for (std::size_t x = 0; x < outcomes; ++x) count *= static_cast<double>(m);
  if (count > static_cast<double>(kBruteForceMaxEstimators))
    throw CapacityError("brute_force_minimax: estimator table exceeds the enumeration budget");
  const auto tables = static_cast<std::size_t>(count);

  // product probabilities of each outcome under both hypotheses
  std::vector<double> p1(outcomes, 1.0), p2(outcomes, 1.0);
  for (std::size_t x = 0; x < outcomes; ++x) {
    std::size_t code = x;
    for (int i = 0; i < n; ++i) {
      p1[x] *= masses[code % k].first;
      p2[x] *= masses[code % k].second;
      code /= k;
    }
  }
  // loss of each grid point against both true parameters
  std::vector<double> l1(m), l2(m), radii = {0.0};
  for (std::size_t c = 0; c < m; ++c) {
    l1[c] = loss(theta_grid[c], theta_grid[0]);
    l2[c] = loss(theta_grid[c], theta_grid[1]);
    radii.push_back(l1[c]);
    radii.push_back(l2[c]);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  auto quantile = [&](const std::vector<double>& probs, const std::vector<double>& losses) {
    for (double r : radii) {
      double exceed = 0.0;
      for (std::size_t x = 0; x < outcomes; ++x)
        if (losses[x] > r) exceed += probs[x];
      if (exceed <= delta + tol) return r;
    }
    return radii.back();
  };

  MinimaxValues out;
  out.estimators = tables;
  out.M = std::numeric_limits<double>::infinity();
  std::vector<double> best_exceed(radii.size(), std::numeric_limits<double>::infinity());
  std::vector<std::size_t> table(outcomes, 0);
  std::vector<double> e1(outcomes), e2(outcomes);
  for (std::size_t t = 0; t < tables; ++t) {
    std::size_t code = t;
    for (std::size_t x = 0; x < outcomes; ++x) {
      table[x] = code % m;
      code /= m;
      e1[x] = l1[table[x]];
      e2[x] = l2[table[x]];
    }
    out.M = std::min(out.M, std::max(quantile(p1, e1), quantile(p2, e2)));
    for (std::size_t i = 0; i < radii.size(); ++i) {
      double x1 = 0.0, x2 = 0.0;
      for (std::size_t x = 0; x < outcomes; ++x) {
        if (e1[x] > radii[i]) x1 += p1[x];
        if (e2[x] > radii[i]) x2 += p2[x];
      }
      best_exceed[i] = std::min(best_exceed[i], std::max(x1, x2));
    }
  }
  // the minimax exceedance is a right-continuous step function of r with
  // jumps only at attainable losses
  out.M_minus = radii.back();
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (best_exceed[i] <= delta + tol) {
      out.M_minus = radii[i];
      break;
    }
  return out;
}

// Least-squares slope of log(value) against log(n).
inline double rate_fit(const std::vector<std::pair<double, double>>& points) {
  require(points.size() >= 3, "rate_fit: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, v] : points) {
    require(n > 0.0 && v > 0.0, "rate_fit: sample sizes and values must be positive");
    sx += std::log(n);
    sy += std::log(v);
  }
  const double k = static_cast<double>(points.size()), mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, v] : points) {
    sxx += (std::log(n) - mx) * (std::log(n) - mx);
    sxy += (std::log(n) - mx) * (std::log(v) - my);
  }
  require(sxx > 0.0, "rate_fit: sample sizes must not all coincide");
  return sxy / sxx;
}

}  // namespace minimaxq
