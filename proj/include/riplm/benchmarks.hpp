#pragma once

// Comparator benchmarks: best fixed ranking (exhaustive for N <= 10, local
// search beyond), distributional loss at a given comparator, the PL-to-rank
// gap and regret assembly.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "riplm/history.hpp"
#include "riplm/pl_core.hpp"

namespace riplm {

inline constexpr std::size_t kMaxExhaustiveExperts = 10;

struct BenchmarkResult {
  double value = 0.0;
  std::variant<Ranking, Distribution> argmin;
  /// False when value is only an upper bound (heuristic search).
  bool exact = true;
};

/// sum_t l_{t, sigma(E_t)}, summed in round order. Every routine in this
/// module that reports a ranking's loss uses this summation order.
double rank_loss(const LossHistory& hist, const Ranking& sigma);

/// Exact rank benchmark by branch and bound over prefixes, with the first
/// rank position split across OpenMP threads. Ties go to the
/// lexicographically smallest ranking. Throws for N > 10.
BenchmarkResult rank_benchmark_exhaustive(const LossHistory& hist);

/// Serial reference: enumerates all N! rankings in lexicographic order.
BenchmarkResult rank_benchmark_exhaustive_serial(const LossHistory& hist);

/// Upper bound: greedy insertion then pairwise-swap local search (at most
/// N^2 passes). exact = false.
BenchmarkResult rank_benchmark_heuristic(const LossHistory& hist);

/// Exhaustive when N <= 10, heuristic otherwise.
BenchmarkResult rank_benchmark(const LossHistory& hist);

/// sum_t <restrict(u, E_t), l_t>. Throws naming the first round where u has
/// no mass on the awake set.
double distributional_loss(const LossHistory& hist, const Distribution& u);

/// exp(-1/tau) / (1 - exp(-1/tau)).
double pl_rank_gap_bound(Temperature tau);

/// Per round: <u^tau_sigma, l_t> - l_{t, sigma(E_t)}.
std::vector<double> empirical_pl_rank_gap(const LossHistory& hist,
                                          const Ranking& sigma,
                                          Temperature tau);

/// sum_t <p_t, l_t> - benchmark.value. Throws if a played distribution's
/// support differs from its round's awake set.
double regret(const LossHistory& hist, std::span<const Distribution> played,
              const BenchmarkResult& benchmark);

/// sum_t <p_t, l_t> for played distributions aligned with hist.
double cumulative_expected_loss(const LossHistory& hist,
                                std::span<const Distribution> played);

}  // namespace riplm
