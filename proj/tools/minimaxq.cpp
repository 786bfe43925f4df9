#include <iostream>

#include <CLI11.hpp>

#include "minimaxq/cli.hpp"

int main(int argc, char** argv) {
  using namespace minimaxq;
  CLI::App app{"High-probability minimax lower bounds: certified bounds and Monte Carlo checks"};
  app.require_subcommand(1);

  std::string config, out, format, results;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int d = 0, s = 0;
  std::size_t max_words = 0;
  auto* o_config = app.add_option("--config", config, "key = value config file");
  auto* o_seed = app.add_option("--seed", seed, "master seed (overrides experiment.seed)");
  auto* o_threads = app.add_option("--threads", threads, "worker threads (overrides experiment.threads)")
                        ->check(CLI::Range(1u, 1024u));
  auto* o_out = app.add_option("--out", out, "output file (default stdout)");
  auto* o_format = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* bound = app.add_subcommand("bound", "print lower and upper bounds with validity ranges")->fallthrough();
  auto* simulate = app.add_subcommand("simulate", "run the Monte Carlo experiment and write result rows")->fallthrough();
  auto* verify = app.add_subcommand("verify", "check lb <= quantile <= ub per row; exit 1 on any FAIL")->fallthrough();
  auto* pack = app.add_subcommand("pack", "print a sparse Hamming packing")->fallthrough();
  auto* report = app.add_subcommand("report", "summarize result rows with pass counts and rate slopes")->fallthrough();
  CLI::Option* o_results_v = verify->add_option("--results", results, "CSV or JSON rows to verify");
  CLI::Option* o_results_r = report->add_option("--results", results, "CSV or JSON rows to summarize");
  auto* o_d = pack->add_option("--d", d, "dimension");
  auto* o_s = pack->add_option("--s", s, "sparsity");
  auto* o_max = pack->add_option("--max-words", max_words, "stop after this many words (0: no cap)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CliOptions opts;
  if (o_config->count()) opts.config = config;
  if (o_seed->count()) opts.seed = seed;
  if (o_threads->count()) opts.threads = threads;
  if (o_out->count()) opts.out = out;
  if (o_format->count()) opts.format = format;
  if (o_results_v->count() || o_results_r->count()) opts.results = results;
  if (o_d->count()) opts.d = d;
  if (o_s->count()) opts.s = s;
  if (o_max->count()) opts.max_words = max_words;

  try {
    if (*bound) return cmd_bound(opts, std::cout);
    if (*simulate) return cmd_simulate(opts, std::cout);
    if (*verify) return cmd_verify(opts, std::cout);
    if (*pack) return cmd_pack(opts, std::cout);
    if (*report) return cmd_report(opts, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
