// riplm: experiment runner for the RIPLM sleeping-experts learner.
//
//   riplm run          --config cfg.json [--seeds 1,2,3] [--out dir] [--workers n]
//   riplm check        --config cfg.json [--seeds ...] [--workers n]
//   riplm bench-oracle [--experts 6] [--horizon 50] [--trials 100] [--seeds 1]
//   riplm gradcheck    [--instances 1000] [--seeds 1] [--tau-lo 0.05] [--tau-hi 5]
//
// Exit status: 0 all checks pass, 1 a check failed, 2 config or I/O error.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riplm/benchmarks.hpp"
#include "riplm/format.hpp"
#include "riplm/gradcheck.hpp"
#include "riplm/harness/config.hpp"
#include "riplm/harness/diagnostics.hpp"
#include "riplm/harness/experiment.hpp"
#include "riplm/harness/output.hpp"
#include "riplm/random.hpp"

namespace {

using namespace riplm;
using namespace riplm::harness;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config;
  std::string seeds;
  std::string out;
  int workers = 1;
};

ExperimentConfig resolve_config(const CommonOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config);
  if (!opt.seeds.empty()) cfg.seeds = parse_seed_list(opt.seeds);
  if (!opt.out.empty()) cfg.output = opt.out;
  cfg.validate();
  return cfg;
}

void print_report(const DiagnosticReport& rep) {
  for (const auto& c : rep.checks) {
    std::printf("%-4s %-20s %-10s lhs=%-14s rhs=%-14s %s%s\n",
                c.passed ? "ok" : (c.hard ? "FAIL" : "warn"), c.name.c_str(),
                c.seed ? ("seed=" + std::to_string(*c.seed)).c_str() : "-",
                format_double(c.lhs).c_str(), format_double(c.rhs).c_str(),
                c.hard ? "" : "[report] ", c.detail.c_str());
  }
  std::printf("%zu checks, %zu hard failures\n", rep.checks.size(), rep.failures());
}

int cmd_run(const CommonOptions& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  omp_set_num_threads(std::max(1, opt.workers));
  const auto logs = run_experiment(cfg, opt.workers);
  const auto report = run_diagnostics(logs, cfg);
  const auto files = emit_results(logs, report, cfg, cfg.output);
  print_report(report);
  std::printf("wrote %zu trial files, %s, %s\n", files.trials.size(),
              files.summary.string().c_str(), files.schema.string().c_str());
  return report.all_hard_passed() ? kExitOk : kExitCheckFailed;
}

int cmd_check(const CommonOptions& opt) {
  const ExperimentConfig cfg = resolve_config(opt);
  omp_set_num_threads(std::max(1, opt.workers));
  const auto logs = run_experiment(cfg, opt.workers);
  const auto report = run_diagnostics(logs, cfg);
  print_report(report);
  return report.all_hard_passed() ? kExitOk : kExitCheckFailed;
}

LossHistory random_sleeping_history(std::size_t n, std::size_t horizon, Rng& rng) {
  LossHistory h{n, {}};
  for (std::size_t t = 0; t < horizon; ++t) {
    std::vector<ExpertIndex> m;
    while (m.empty())
      for (std::size_t i = 0; i < n; ++i)
        if (uniform01(rng) < 0.6) m.push_back(i);
    std::vector<double> l(m.size());
    for (double& v : l) v = uniform01(rng);
    h.rounds.push_back({AwakeSet(std::move(m), n), std::move(l)});
  }
  return h;
}

int cmd_bench_oracle(std::size_t n, std::size_t horizon, std::size_t trials,
                     const std::string& seeds, int workers) {
  if (n > kMaxExhaustiveExperts)
    throw ConfigError("--experts", "exhaustive comparison needs N <= 10");
  omp_set_num_threads(std::max(1, workers));
  const auto seed = seeds.empty() ? std::uint64_t{1} : parse_seed_list(seeds).front();
  Rng rng = make_stream(seed, {0x6f7261636c65ULL});
  double gap_sum = 0.0, gap_max = 0.0, t_exact = 0.0, t_heur = 0.0;
  std::size_t exact_hits = 0;
  bool bound_ok = true;
  for (std::size_t k = 0; k < trials; ++k) {
    const auto h = random_sleeping_history(n, horizon, rng);
    auto t0 = std::chrono::steady_clock::now();
    const auto exact = rank_benchmark_exhaustive(h);
    auto t1 = std::chrono::steady_clock::now();
    const auto heur = rank_benchmark_heuristic(h);
    auto t2 = std::chrono::steady_clock::now();
    t_exact += std::chrono::duration<double>(t1 - t0).count();
    t_heur += std::chrono::duration<double>(t2 - t1).count();
    const double gap = exact.value > 0.0 ? (heur.value - exact.value) / exact.value
                                         : heur.value - exact.value;
    bound_ok = bound_ok && heur.value >= exact.value;
    gap_sum += gap;
    gap_max = std::max(gap_max, gap);
    if (heur.value == exact.value) ++exact_hits;
  }
  std::printf("N=%zu T=%zu trials=%zu\n", n, horizon, trials);
  std::printf("heuristic mean relative gap %s, max %s, exact on %zu/%zu\n",
              format_double(gap_sum / static_cast<double>(trials)).c_str(),
              format_double(gap_max).c_str(), exact_hits, trials);
  std::printf("time exhaustive %.4fs heuristic %.4fs\n", t_exact, t_heur);
  std::printf("heuristic >= exhaustive on every trial: %s\n", bound_ok ? "yes" : "NO");
  return bound_ok ? kExitOk : kExitCheckFailed;
}

int cmd_gradcheck(std::size_t instances, const std::string& seeds, double tau_lo,
                  double tau_hi) {
  if (!(tau_lo > 0.0 && tau_lo <= tau_hi))
    throw ConfigError("--tau-lo/--tau-hi", "need 0 < tau-lo <= tau-hi");
  const auto seed = seeds.empty() ? std::uint64_t{1} : parse_seed_list(seeds).front();
  const auto s = gradient_check_sweep(instances, seed, 16, tau_lo, tau_hi);
  const bool ok = s.max_relative_error <= 1e-6;
  std::printf("%zu instances, max relative error %s (worst #%zu), %.3fs: %s\n",
              s.instances, format_double(s.max_relative_error).c_str(),
              s.worst_instance, s.seconds, ok ? "ok" : "FAIL");
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIPLM sleeping-experts experiment runner"};
  app.require_subcommand(1);

  CommonOptions run_opt, check_opt;
  auto add_common = [](CLI::App* sub, CommonOptions& o, bool with_out) {
    sub->add_option("--config", o.config, "experiment config (JSON)")->required();
    sub->add_option("--seeds", o.seeds, "seed list overriding the config, e.g. 1,2,5-9");
    if (with_out) sub->add_option("--out", o.out, "output directory");
    sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* run = app.add_subcommand("run", "run trials, diagnostics and write results");
  add_common(run, run_opt, true);
  auto* check = app.add_subcommand("check", "run trials and diagnostics only");
  add_common(check, check_opt, false);

  std::size_t bo_n = 6, bo_t = 50, bo_trials = 100;
  std::string bo_seeds;
  int bo_workers = 1;
  auto* bench = app.add_subcommand("bench-oracle", "exhaustive vs heuristic rank benchmark");
  bench->add_option("--experts", bo_n, "number of experts (<= 10)");
  bench->add_option("--horizon", bo_t, "rounds per history");
  bench->add_option("--trials", bo_trials, "random histories");
  bench->add_option("--seeds", bo_seeds, "seed (first entry used)");
  bench->add_option("--workers", bo_workers, "threads for the exhaustive search")
      ->check(CLI::PositiveNumber);

  std::size_t gc_instances = 1000;
  std::string gc_seeds;
  double gc_tau_lo = 0.05, gc_tau_hi = 5.0;
  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient sweep");
  grad->add_option("--instances", gc_instances, "random instances");
  grad->add_option("--seeds", gc_seeds, "seed (first entry used)");
  // Far below ~1e-3 the fixed 1e-6 difference step is too coarse for the tolerance.
  grad->add_option("--tau-lo", gc_tau_lo, "smallest sampled temperature");
  grad->add_option("--tau-hi", gc_tau_hi, "largest sampled temperature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_opt);
    if (*check) return cmd_check(check_opt);
    if (*bench) return cmd_bench_oracle(bo_n, bo_t, bo_trials, bo_seeds, bo_workers);
    if (*grad) return cmd_gradcheck(gc_instances, gc_seeds, gc_tau_lo, gc_tau_hi);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
