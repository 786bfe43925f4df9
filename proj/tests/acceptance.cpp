// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance <path to the minimaxq binary>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "minimaxq/bounds.hpp"
#include "minimaxq/cli.hpp"
#include "minimaxq/divergences.hpp"
#include "minimaxq/estimators.hpp"
#include "minimaxq/montecarlo.hpp"
#include "minimaxq/problems.hpp"

using namespace minimaxq;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[violated: " << what << "] ";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Simulated rows for one problem, built exactly as the simulate command does.
std::vector<ResultRow> rows_for(const std::string& problem, std::map<std::string, std::string> params, int n,
                                std::vector<double> deltas, std::size_t reps,
                                std::optional<EstimatorSpec> estimator = std::nullopt) {
  ExperimentConfig e;
  e.problem = problem;
  e.params.values = std::move(params);
  e.ns = {n};
  e.deltas = std::move(deltas);
  e.reps = reps;
  e.seed = kSeed;
  e.estimator = std::move(estimator);
  return simulate_rows(e);
}

// Checks every row's sandwich and records the quantiles and margins.
void sandwich(Outcome& o, const std::vector<ResultRow>& rows) {
  for (const auto& r : rows) {
    const auto v = r.verdict();
    o.detail << "delta=" << fmt(r.delta) << " lb=" << (r.lb ? fmt(*r.lb) : "n/a") << " q=" << fmt(r.emp_q)
             << " ub=" << (r.ub ? fmt(*r.ub) : "n/a") << "; ";
    o.require(v.lower_ok, "lb <= DKW-upper at delta=" + fmt(r.delta));
    o.require(v.upper_ok, "DKW-lower <= ub at delta=" + fmt(r.delta));
  }
}

DiscreteDist random_discrete(Rng& rng, int k) {
  std::vector<double> xs, ps;
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    xs.push_back(i);
    ps.push_back(uniform01(rng) + 1e-3);
    total += ps.back();
  }
  for (auto& p : ps) p /= total;
  double rest = 1.0;
  for (int i = 0; i + 1 < k; ++i) rest -= ps[static_cast<std::size_t>(i)];
  ps.back() = rest;
  return DiscreteDist(xs, ps);
}

void exact_constants(Outcome& o) {
  const std::vector<double> lambda = {5, 4, 3, 2, 1};
  const double n = 200, tr = 15.0;
  std::vector<double> alphas;
  for (double l : lambda) alphas.push_back((4.0 / 3) * std::sqrt(l / n));
  const double assouad = assouad_risk_lb(alphas, pinsker_tv_bound(8.0 / 9.0), Transform::square(), 2.0);
  o.require(close(assouad, 4 * tr / (27 * n), 1e-12), "assouad = 4tr/(27n)");

  const auto c = risk_to_quantile(4 * tr / (27 * n), (4.0 / 3.0) * std::sqrt(tr / n), Transform::square(), 3.0 / 40);
  o.require(c && close(c->value, tr / (100 * n), 1e-12), "risk_to_quantile = tr/(100n)");
  o.require(c && c->valid_at(1.0 / 15) && c->valid_at(1e-9), "valid on (0,1/15]");

  const double hh = boost_h(boost_h(0.25));
  o.require(close(hh, 2150.0 / 32768, 1e-12) && hh < 1.0 / 15, "h(h(1/4)) = 2150/32768 < 1/15");
  const int k = boost_find_k(1.0 / 1000, 0.25);
  o.require(k == 4, "boost_find_k(1/1000, 1/4) = 4");
  o.detail << "assouad=" << fmt(assouad) << " quantile=" << (c ? fmt(c->value) : "none") << " h(h(1/4))=" << hh
           << " k=" << k;
}

void divergence_suite(Outcome& o) {
  Rng rng(11);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    const int k = 2 + static_cast<int>(rng() % 5);
    const auto p = random_discrete(rng, k), q = random_discrete(rng, k);
    const double tv = tv_discrete(p, q), kl = kl_discrete(p, q);
    if (tv > pinsker_tv_bound(kl) + 1e-12 || tv > bretagnolle_huber_tv_bound(kl) + 1e-12) ++bad;
  }
  o.require(bad == 0, std::to_string(bad) + " TV bound violations");
  o.detail << "tv bounds on 1000 pairs: " << bad << " violations; ";
  for (int d = 1; d <= 4; ++d) {
    const Matrix A = Matrix::Random(d, d), B = Matrix::Random(d, d);
    const GaussianDist p(Vector::Random(d), A * A.transpose() + Matrix::Identity(d, d));
    const GaussianDist q(Vector::Random(d), B * B.transpose() + 0.5 * Matrix::Identity(d, d));
    const int N = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < N; ++i) {
      const Vector x = p.sample(rng);
      const double r = p.log_density(x) - q.log_density(x);
      sum += r;
      sumsq += r * r;
    }
    const double mean = sum / N, se = std::sqrt((sumsq / N - mean * mean) / N);
    const double z = (kl_gaussian(p, q) - mean) / se;
    o.require(std::abs(z) <= 3.0, "gaussian KL within 3 SE at d=" + std::to_string(d));
    o.detail << "d=" << d << " kl=" << fmt(kl_gaussian(p, q)) << " z=" << fmt(z) << " ";
  }
}

void le_cam_oracle(Outcome& o) {
  const LossModel loss(Metric::scalar_abs, Transform::threshold(0.25));
  Rng rng(31);
  int issued = 0, violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const double a = 0.02 + 0.96 * uniform01(rng), b = 0.02 + 0.96 * uniform01(rng);
    const int n = 1 + trial % 3;
    const double delta = 0.01 + 0.48 * uniform01(rng);
    const auto P1 = bernoulli(a), P2 = bernoulli(b);
    std::vector<Vector> grid = {Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)};
    if (trial % 2) grid.push_back(Vector::Constant(1, 0.5));
    const auto v = brute_force_minimax(P1, P2, n, grid, loss, delta);
    const auto half = brute_force_minimax(P1, P2, n, grid, loss, delta / 2.0);
    if (!(v.M_minus <= v.M && v.M <= half.M_minus)) ++violations;
    const double kl = tensorize_kl(kl_discrete(P1, P2), n);
    const std::vector<std::optional<BoundCertificate>> certs = {
        le_cam_quantile_lb(tv_product_exact(P1, P2, n), 0.5, loss.g(), delta),
        le_cam_kl_quantile_lb(kl, 0.5, loss.g(), delta), fano_quantile_lb({0.0, kl}, 0.5, loss.g())};
    for (const auto& c : certs)
      if (c && c->valid_at(delta)) {
        ++issued;
        if (c->value > v.M_minus) ++violations;
      }
  }
  o.require(violations == 0, std::to_string(violations) + " violations");
  o.detail << "50 instances, " << issued << " certificates issued, " << violations << " violations";
}

void gaussian_mean(Outcome& o) {
  const auto rows = rows_for("gaussian_mean_sq", {{"d", "5"}, {"spectrum", "linear"}}, 200, {0.25, 0.05}, 20000);
  for (const auto& r : rows) {
    const double ub = 2 * 15.0 / 200 + 4 * 5.0 * std::log(1 / r.delta) / 200;
    o.require(r.ub && close(*r.ub, ub, 1e-12), "ub = 2tr/n + 4|S|log(1/delta)/n");
  }
  sandwich(o, rows);
}

void linf_mean(Outcome& o) {
  const auto rows = rows_for("gaussian_mean_linf", {{"d", "50"}, {"sigma", "1"}}, 500, {0.05}, 10000);
  const double ld = std::log(50 / 0.05);
  for (const auto& r : rows) {
    o.require(r.lb && close(*r.lb, std::sqrt(ld / (80.0 * 500)), 1e-12), "lb formula");
    o.require(r.ub && close(*r.ub, std::sqrt(2 * ld / 500), 1e-12), "ub formula");
  }
  sandwich(o, rows);
}

void covariance(Outcome& o) {
  const auto rows = rows_for("covariance_opnorm", {{"d", "30"}, {"r", "10"}}, 2000, {0.05}, 2000);
  for (const auto& r : rows)
    if (!r.ub) o.detail << "(ub validity condition fails, upper check skipped) ";
  sandwich(o, rows);
}

void sparse(Outcome& o) {
  const auto rows = rows_for("sparse_regression", {{"d", "100"}, {"s", "5"}, {"sigma", "1"}, {"c", "0.5"}, {"C", "2"}},
                             400, {0.05}, 1000);
  for (const auto& r : rows) o.require(r.ub.has_value(), "ub defined");
  sandwich(o, rows);
}

void density(Outcome& o) {
  std::vector<std::pair<double, double>> worst;
  for (int n = 256; n <= 16384; n *= 2) {
    const auto rows = rows_for("density_point", {{"beta", "1"}, {"gamma", "1"}}, n, {0.05}, 1000);
    double q = 0.0;
    for (const auto& r : rows) q = std::max(q, r.emp_q);
    worst.emplace_back(n, q);
    if (n == 4096) {
      o.detail << "n=4096: ";
      for (const auto& r : rows) o.require(r.verdict().lower_ok, "lb <= DKW-upper at n=4096");
      o.detail << "lb=" << fmt(*rows.front().lb) << " q=" << fmt(q) << "; ";
    }
  }
  o.detail << "worst quantile by n:";
  for (const auto& [n, q] : worst) o.detail << " " << fmt(q);
  bool positive = std::all_of(worst.begin(), worst.end(), [](const auto& p) { return p.second > 0.0; });
  o.require(positive, "positive quantiles for the rate fit");
  if (positive) {
    const double slope = rate_fit(worst);
    o.detail << "; slope=" << fmt(slope) << " ";
    o.require(slope >= -0.8 && slope <= -0.5, "slope in [-0.8, -0.5]");
  }
}

void isotonic_check(Outcome& o) {
  const auto rows = rows_for("isotonic", {}, 1000, {0.25, 0.01}, 5000);
  for (const auto& r : rows) {
    const double ub = kIsotonicFittedConstant * (std::pow(1000.0, -2.0 / 3) + std::log(1 / r.delta) / 1000);
    o.require(r.ub && close(*r.ub, ub, 1e-12), "ub = C (n^{-2/3} + log(1/delta)/n)");
  }
  sandwich(o, rows);
}

void sco(Outcome& o) {
  const auto rows = rows_for("sco_hard_instance", {{"gamma", "1"}, {"R", "1"}}, 500, {0.05}, 5000);
  const double rate = std::sqrt(std::log(20.0) / 500);
  for (const auto& r : rows) {
    o.require(r.lb && close(*r.lb, rate / std::sqrt(30.0), 1e-12), "lb = (gR/sqrt 30) sqrt(log(1/delta)/T)");
    o.require(r.ub && close(*r.ub, 20 * rate, 1e-12), "ub = 20 gR sqrt(log(1/delta)/T)");
  }
  sandwich(o, rows);
}

void catoni(Outcome& o) {
  const double delta = 0.01, n = 100;
  const auto mean_rows = rows_for("catoni_adversary", {{"sigma", "1"}}, 100, {delta}, 100000);
  const auto mom_rows = rows_for("catoni_adversary", {{"sigma", "1"}}, 100, {delta}, 100000,
                                 EstimatorSpec{EstimatorKind::median_of_means, {}});
  const double q_mean = mean_rows.front().emp_q, q_mom = mom_rows.front().emp_q;
  const double lb = 1.0 / (std::exp(1.0) * n * delta);
  const double stated = std::log(1 / delta) / n;  // 0.046
  const double formula = 100 * stated;            // 4.6
  o.require(q_mean >= lb, "sample-mean quantile >= 1/e");
  o.require(q_mom <= stated, "MoM quantile <= 0.046");
  o.require(q_mom <= formula, "MoM quantile <= 100 log(1/delta)/n");
  o.require(q_mean >= 8 * q_mom, "8x separation");
  o.detail << "sample mean q=" << fmt(q_mean) << " (>= " << fmt(lb) << "), median of means q=" << fmt(q_mom)
           << " (<= " << fmt(stated) << " and <= " << fmt(formula) << "), ratio=" << fmt(q_mean / q_mom);
}

void huber(Outcome& o) {
  double worst = 0.0;
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.3, std::sqrt(2.0) - 1.0}) {
    const auto core = huber_core(5.0, eps);
    const auto M1 = contaminate(core.R1, core.witnesses.Q1, core.witnesses.eps_prime);
    const auto M2 = contaminate(core.R2, core.witnesses.Q2, core.witnesses.eps_prime);
    for (const auto& [a, b] : merged_masses(M1, M2)) worst = std::max(worst, std::abs(a - b));
  }
  o.require(worst <= 1e-12, "witness mixtures coincide atom-wise");
  const Matrix Sigma = mean_covariance(5, "linear", 1.0);
  const double eps = 0.1, contamination = 5.0 * eps / 8.0;
  const auto p = robust_mean_huber(200, Sigma, eps);
  const auto g = gaussian_mean_sq(200, Sigma);
  for (double delta : {0.25, 0.05, 0.01}) {
    o.require(*p.lb(delta) == std::max(*g.lb(delta), contamination), "lb = max(gaussian, |S| eps/8)");
    o.require(close(p.certificates(delta).back().value, contamination, 1e-15), "modulus certificate = |S| eps/8");
  }
  o.detail << "max atom gap=" << worst << ", |S| eps/8=" << contamination << ", lb(0.05)=" << fmt(*p.lb(0.05));
}

// Minimizes sum (theta_i - y_i)^2 over nondecreasing sequences on a grid.
Vector monotone_grid_minimizer(const Vector& y, double lo, double hi, double step) {
  const auto G = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  const auto n = static_cast<std::size_t>(y.size());
  std::vector<std::vector<double>> cost(n, std::vector<double>(G));
  std::vector<std::vector<std::size_t>> arg(n, std::vector<std::size_t>(G));
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_g = 0;
    for (std::size_t g = 0; g < G; ++g) {
      if (i > 0 && cost[i - 1][g] < best) {
        best = cost[i - 1][g];
        best_g = g;
      }
      const double v = lo + static_cast<double>(g) * step, r = v - y[static_cast<Eigen::Index>(i)];
      cost[i][g] = r * r + (i > 0 ? best : 0.0);
      arg[i][g] = best_g;
    }
  }
  std::size_t g = static_cast<std::size_t>(std::min_element(cost.back().begin(), cost.back().end()) -
                                           cost.back().begin());
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = n; i-- > 0;) {
    out[static_cast<Eigen::Index>(i)] = lo + static_cast<double>(g) * step;
    g = arg[i][g];
  }
  return out;
}

void estimator_oracles(Outcome& o) {
  Rng rng(13);
  double pava_gap = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Vector y(n);
    for (auto& v : y) v = 3.0 * uniform01(rng) - 1.0;
    pava_gap = std::max(pava_gap, (pava(y) - monotone_grid_minimizer(y, -1.0, 2.0, 1e-3)).cwiseAbs().maxCoeff());
  }
  o.require(pava_gap <= 2e-3, "PAVA within 2e-3 of grid QP");

  int prox_bad = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = 1 + static_cast<int>(rng() % 6);
    Vector z(d);
    for (auto& v : z) v = 4.0 * uniform01(rng) - 2.0;
    if (d > 2 && inst % 3 == 0) z[1] = -z[0];
    std::vector<double> w(static_cast<std::size_t>(d));
    for (auto& v : w) v = 2.0 * uniform01(rng);
    std::sort(w.begin(), w.end(), std::greater<>());
    const Vector lam = Eigen::Map<Vector>(w.data(), d);
    auto f = [&](const Vector& x) { return 0.5 * (x - z).squaredNorm() + sorted_l1_norm(x, lam); };
    const Vector x = prox_sorted_l1(z, lam);
    const double fx = f(x);
    for (int p = 0; p < 200; ++p) {
      Vector e(d);
      for (auto& v : e) v = (2.0 * uniform01(rng) - 1.0) * 1e-4;
      if (fx > f(x + e) + 1e-15) {
        ++prox_bad;
        break;
      }
    }
  }
  o.require(prox_bad == 0, "prox_sorted_l1 locally optimal");

  int mo3_bad = 0;
  const LossModel L(Metric::euclidean, Transform::identity());
  for (int t = 0; t < 1000; ++t) {
    const int d = 1 + static_cast<int>(rng() % 4);
    const double r = 0.1 + uniform01(rng);
    Vector theta(d);
    for (auto& v : theta) v = standard_normal(rng);
    std::array<Vector, 3> c;
    for (int k = 0; k < 3; ++k) {
      Vector u(d);
      for (auto& v : u) v = standard_normal(rng);
      u.normalize();
      const double radius = k < 2 ? uniform01(rng) * r : 20.0 * uniform01(rng);
      c[static_cast<std::size_t>(k)] = theta + radius * 0.999 * u;
    }
    std::shuffle(c.begin(), c.end(), rng);
    if (L(median_of_three(c, r, L, Vector::Constant(d, 1e6)), theta) > 2 * L.A() * r + 1e-12) ++mo3_bad;
  }
  o.require(mo3_bad == 0, "median_of_three within 2Ar");

  double lr_gap = 0.0;
  const Vector t1 = Vector::Constant(1, 0.0), t2 = Vector::Constant(1, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double p = uniform01(rng), q = uniform01(rng);
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto rule = lr_two_point(bernoulli(p), bernoulli(q), n, t1, t2);
    lr_gap = std::max(lr_gap, std::abs(rule.average_error() - (1 - tv_product_exact(bernoulli(p), bernoulli(q), n)) / 2));
  }
  o.require(lr_gap <= 1e-14, "likelihood-ratio error = (1 - TV)/2");
  o.detail << "pava gap=" << fmt(pava_gap) << ", prox failures=" << prox_bad << "/100, median_of_three failures="
           << mo3_bad << "/1000, LR error gap=" << lr_gap;
}

std::string run_binary(const std::string& cmd, int& code) {
  std::string out;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) {
    code = -1;
    return out;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
  const int status = pclose(p);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void determinism(Outcome& o, const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("minimaxq_acceptance_" + std::to_string(getpid()));
  fs::create_directories(dir);
  const std::string cfg = (dir / "det.conf").string();
  std::ofstream(cfg) << "problem.name = sco_hard_instance\nproblem.n = 100, 200\n"
                        "experiment.reps = 2000\nexperiment.deltas = 0.25, 0.05\nexperiment.seed = 7\n";
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "1", "4"}) {
    int code = 0;
    outputs.push_back(run_binary(cli + " --config " + cfg + " --threads " + threads + " simulate", code));
    o.require(code == 0, std::string("simulate exit 0 with --threads ") + threads);
  }
  fs::remove_all(dir);
  o.require(outputs[0] == outputs[1], "identical across runs");
  o.require(outputs[0] == outputs[2], "identical across --threads 1 and 4");
  o.require(outputs[0].rfind(kCsvHeader, 0) == 0, "CSV header");
  o.detail << outputs[0].size() << " bytes, " << std::count(outputs[0].begin(), outputs[0].end(), '\n') - 1
           << " rows, 3 runs identical=" << (outputs[0] == outputs[1] && outputs[0] == outputs[2]);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to minimaxq>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"exact constants", exact_constants},
      {"divergence suite", divergence_suite},
      {"Le Cam exactness oracle", le_cam_oracle},
      {"Gaussian mean sandwich", gaussian_mean},
      {"sup-norm mean sandwich", linf_mean},
      {"covariance sandwich", covariance},
      {"sparse regression sandwich", sparse},
      {"density lower bound and rate", density},
      {"isotonic sandwich", isotonic_check},
      {"SCO sandwich", sco},
      {"Catoni tail separation", catoni},
      {"Huber identity", huber},
      {"estimator oracles", estimator_oracles},
      {"simulate determinism", [&](Outcome& o) { determinism(o, cli); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << " (" << fmt(secs)
              << " s): " << o.detail.str() << std::endl;
  }
  std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria PASS" << std::endl;
  return failed ? 1 : 0;
}
