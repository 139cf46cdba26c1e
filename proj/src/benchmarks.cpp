#include "riplm/benchmarks.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

namespace riplm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Loss of the top-ranked awake expert in one round.
double top_loss(const Round& r, const Ranking& sigma) {
  std::size_t best_rank = sigma.size();
  double loss = 0.0;
  for (std::size_t k = 0; k < r.awake.size(); ++k) {
    const std::size_t rk = sigma.rank_of(r.awake[k]);
    if (rk < best_rank) {
      best_rank = rk;
      loss = r.losses[k];
    }
  }
  return loss;
}

void check_ranking(const LossHistory& hist, const Ranking& sigma) {
  if (sigma.size() != hist.n_experts)
    throw std::invalid_argument("ranking size does not match N");
}

// Dense view of a history for the branch-and-bound search.
struct DenseHistory {
  std::size_t n = 0;
  std::size_t t = 0;
  std::vector<double> loss;  // t * n, NaN when asleep
  std::vector<double> round_min;

  explicit DenseHistory(const LossHistory& h)
      : n(h.n_experts),
        t(h.horizon()),
        loss(n * t, std::numeric_limits<double>::quiet_NaN()),
        round_min(t, kInf) {
    for (std::size_t r = 0; r < t; ++r) {
      const Round& rd = h.rounds[r];
      for (std::size_t k = 0; k < rd.awake.size(); ++k) {
        loss[r * n + rd.awake[k]] = rd.losses[k];
        round_min[r] = std::min(round_min[r], rd.losses[k]);
      }
    }
  }
  bool awake(std::size_t r, std::size_t i) const {
    return !std::isnan(loss[r * n + i]);
  }
  double at(std::size_t r, std::size_t i) const { return loss[r * n + i]; }
};

// Lowers `target` to `v` if v is smaller.
void atomic_min(std::atomic<double>& target, double v) {
  double cur = target.load(std::memory_order_relaxed);
  while (v < cur &&
         !target.compare_exchange_weak(cur, v, std::memory_order_relaxed)) {
  }
}

// Depth-first search over ranking prefixes in lexicographic order. A prefix
// that already decides every round stands for its lexicographically smallest
// completion (remaining experts ascending); all other completions tie with it.
class PrefixSearch {
 public:
  PrefixSearch(const DenseHistory& h, std::atomic<double>& shared_best,
               double slack)
      : h_(h),
        shared_best_(shared_best),
        slack_(slack),
        chosen_(h.t, 0.0),
        used_(h.n, false),
        levels_(h.n + 1) {
    prefix_.reserve(h.n);
  }

  void run_from(ExpertIndex first) {
    auto& root = levels_[0];
    root.resize(h_.t);
    std::iota(root.begin(), root.end(), std::size_t{0});
    double min_sum = 0.0;
    for (double m : h_.round_min) min_sum += m;
    descend(0, first, 0.0, min_sum);
  }

  double best_value() const { return best_value_; }
  const std::vector<ExpertIndex>& best_order() const { return best_order_; }

 private:
  void descend(std::size_t depth, ExpertIndex e, double partial,
               double remaining_min) {
    const auto& open = levels_[depth];
    auto& next = levels_[depth + 1];
    next.clear();
    for (std::size_t r : open) {
      if (h_.awake(r, e)) {
        chosen_[r] = h_.at(r, e);
        partial += chosen_[r];
        remaining_min -= h_.round_min[r];
      } else {
        next.push_back(r);
      }
    }
    used_[e] = true;
    prefix_.push_back(e);
    visit(depth + 1, partial, remaining_min);
    prefix_.pop_back();
    used_[e] = false;
  }

  void visit(std::size_t depth, double partial, double remaining_min) {
    if (levels_[depth].empty()) {
      leaf();
      return;
    }
    const double bound = std::min(best_value_, shared_best_.load());
    if (partial + remaining_min > bound + slack_) return;
    for (ExpertIndex e = 0; e < h_.n; ++e) {
      if (used_[e]) continue;
      descend(depth, e, partial, remaining_min);
    }
  }

  void leaf() {
    double value = 0.0;
    for (double c : chosen_) value += c;
    if (value < best_value_) {
      best_value_ = value;
      best_order_ = prefix_;
      for (ExpertIndex e = 0; e < h_.n; ++e)
        if (!used_[e]) best_order_.push_back(e);
      atomic_min(shared_best_, value);
    }
  }

  const DenseHistory& h_;
  std::atomic<double>& shared_best_;
  double slack_;
  std::vector<double> chosen_;
  std::vector<bool> used_;
  std::vector<std::vector<std::size_t>> levels_;
  std::vector<ExpertIndex> prefix_;
  double best_value_ = kInf;
  std::vector<ExpertIndex> best_order_;
};

void check_exhaustive_size(const LossHistory& hist) {
  if (hist.n_experts > kMaxExhaustiveExperts)
    throw std::invalid_argument(
        "exhaustive rank benchmark supports N <= 10 (got N=" +
        std::to_string(hist.n_experts) +
        "); use rank_benchmark_heuristic for larger pools");
}

}  // namespace

double rank_loss(const LossHistory& hist, const Ranking& sigma) {
  check_ranking(hist, sigma);
  double v = 0.0;
  for (const Round& r : hist.rounds) v += top_loss(r, sigma);
  return v;
}

BenchmarkResult rank_benchmark_exhaustive(const LossHistory& hist) {
  hist.validate();
  check_exhaustive_size(hist);
  const DenseHistory dense(hist);
  const std::size_t n = hist.n_experts;
  // Pruning slack absorbs the different summation order of the bound.
  const double slack = 1e-9 * (1.0 + static_cast<double>(hist.horizon()));

  std::atomic<double> shared_best{kInf};
  std::vector<double> values(n, kInf);
  std::vector<std::vector<ExpertIndex>> orders(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t f = 0; f < static_cast<std::ptrdiff_t>(n); ++f) {
    PrefixSearch search(dense, shared_best, slack);
    search.run_from(static_cast<ExpertIndex>(f));
    values[f] = search.best_value();
    orders[f] = search.best_order();
  }

  std::size_t winner = 0;
  for (std::size_t f = 1; f < n; ++f)
    if (values[f] < values[winner]) winner = f;
  return {values[winner], Ranking(orders[winner]), true};
}

BenchmarkResult rank_benchmark_exhaustive_serial(const LossHistory& hist) {
  hist.validate();
  check_exhaustive_size(hist);
  std::vector<ExpertIndex> order(hist.n_experts);
  std::iota(order.begin(), order.end(), ExpertIndex{0});
  double best = kInf;
  std::vector<ExpertIndex> best_order = order;
  do {
    const double v = rank_loss(hist, Ranking(order));
    if (v < best) {
      best = v;
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return {best, Ranking(best_order), true};
}

BenchmarkResult rank_benchmark_heuristic(const LossHistory& hist) {
  hist.validate();
  const std::size_t n = hist.n_experts;

  auto full_loss = [&](const std::vector<ExpertIndex>& partial) {
    std::vector<ExpertIndex> order = partial;
    std::vector<bool> in(n, false);
    for (ExpertIndex e : partial) in[e] = true;
    for (ExpertIndex e = 0; e < n; ++e)
      if (!in[e]) order.push_back(e);
    return rank_loss(hist, Ranking(std::move(order)));
  };

  // Greedy insertion: each expert goes to the position that minimizes the
  // loss of the ranking completed with the not-yet-placed experts.
  std::vector<ExpertIndex> order;
  for (ExpertIndex e = 0; e < n; ++e) {
    std::size_t best_pos = 0;
    double best = kInf;
    for (std::size_t pos = 0; pos <= order.size(); ++pos) {
      auto cand = order;
      cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(pos), e);
      const double v = full_loss(cand);
      if (v < best) {
        best = v;
        best_pos = pos;
      }
    }
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_pos), e);
  }

  double value = rank_loss(hist, Ranking(order));
  const std::size_t max_passes = n * n;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    bool improved = false;
    for (std::size_t a = 0; a + 1 < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        std::swap(order[a], order[b]);
        const double v = rank_loss(hist, Ranking(order));
        if (v < value) {
          value = v;
          improved = true;
        } else {
          std::swap(order[a], order[b]);
        }
      }
    }
    if (!improved) break;
  }
  return {value, Ranking(std::move(order)), false};
}

BenchmarkResult rank_benchmark(const LossHistory& hist) {
  return hist.n_experts <= kMaxExhaustiveExperts
             ? rank_benchmark_exhaustive(hist)
             : rank_benchmark_heuristic(hist);
}

double distributional_loss(const LossHistory& hist, const Distribution& u) {
  if (u.support().n_total() != hist.n_experts)
    throw std::invalid_argument("comparator size does not match N");
  double total = 0.0;
  for (std::size_t t = 0; t < hist.horizon(); ++t) {
    const Round& r = hist.rounds[t];
    if (!(u.mass(r.awake) > 0.0))
      throw std::invalid_argument(
          "comparator has zero mass on the awake set of round " +
          std::to_string(t + 1));
    total += expected_loss(restrict_comparator(u, r.awake), r.losses);
  }
  return total;
}

double pl_rank_gap_bound(Temperature tau) {
  // e^{-x} / (1 - e^{-x}) = 1 / (e^{x} - 1)
  return 1.0 / std::expm1(1.0 / tau.value());
}

std::vector<double> empirical_pl_rank_gap(const LossHistory& hist,
                                          const Ranking& sigma,
                                          Temperature tau) {
  check_ranking(hist, sigma);
  std::vector<double> gaps;
  gaps.reserve(hist.horizon());
  for (const Round& r : hist.rounds) {
    const Distribution u = pl_from_ranking_at_temperature(sigma, tau, r.awake);
    gaps.push_back(expected_loss(u, r.losses) - top_loss(r, sigma));
  }
  return gaps;
}

double cumulative_expected_loss(const LossHistory& hist,
                                std::span<const Distribution> played) {
  if (played.size() != hist.horizon())
    throw std::invalid_argument("played sequence length does not match T");
  double total = 0.0;
  for (std::size_t t = 0; t < played.size(); ++t) {
    if (!(played[t].support() == hist.rounds[t].awake))
      throw std::invalid_argument("played distribution at round " +
                                  std::to_string(t + 1) +
                                  " is not supported on the awake set");
    total += expected_loss(played[t], hist.rounds[t].losses);
  }
  return total;
}

double regret(const LossHistory& hist, std::span<const Distribution> played,
              const BenchmarkResult& benchmark) {
  return cumulative_expected_loss(hist, played) - benchmark.value;
}

}  // namespace riplm
