// Serial reference vs OpenMP kernels.
//   riplm_bench --benchmark_filter=Exhaustive

#include <benchmark/benchmark.h>

#include <vector>

#include "riplm/benchmarks.hpp"
#include "riplm/environments.hpp"
#include "riplm/harness/experiment.hpp"

using namespace riplm;

namespace {

LossHistory sleepy_history(std::size_t n, std::size_t T) {
  std::vector<double> means(n), q(n, 0.6);
  for (std::size_t i = 0; i < n; ++i) means[i] = (i + 1.0) / (n + 1.0);
  return generate_stochastic({means, IidAwake{q}, T, 42});
}

void BM_ExhaustiveSerial(benchmark::State& st) {
  const auto h = sleepy_history(st.range(0), 200);
  for (auto _ : st) benchmark::DoNotOptimize(rank_benchmark_exhaustive_serial(h).value);
}

void BM_ExhaustiveParallel(benchmark::State& st) {
  const auto h = sleepy_history(st.range(0), 200);
  for (auto _ : st) benchmark::DoNotOptimize(rank_benchmark_exhaustive(h).value);
}

harness::ExperimentConfig experiment(std::size_t seeds) {
  harness::ExperimentConfig cfg;
  cfg.environment = StochasticEnvSpec{{0.1, 0.3, 0.5, 0.7, 0.9}, IidAwake{{.7, .7, .7, .7, .7}},
                                      2000, 0};
  cfg.algorithm = harness::RiplmAlgorithm{};
  for (std::uint64_t s = 1; s <= seeds; ++s) cfg.seeds.push_back(s);
  return cfg;
}

void BM_ExperimentSerial(benchmark::State& st) {
  const auto cfg = experiment(16);
  for (auto _ : st) benchmark::DoNotOptimize(harness::run_experiment_serial(cfg).size());
}

void BM_ExperimentParallel(benchmark::State& st) {
  const auto cfg = experiment(16);
  for (auto _ : st)
    benchmark::DoNotOptimize(harness::run_experiment(cfg, static_cast<int>(st.range(0))).size());
}

}  // namespace

BENCHMARK(BM_ExhaustiveSerial)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExhaustiveParallel)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
