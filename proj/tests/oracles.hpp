#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: long double arithmetic, plain recursion, direct formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "riplm/history.hpp"
#include "riplm/random.hpp"

namespace oracle {

// softmax(s/tau) over the listed indices, evaluated in long double.
inline std::vector<long double> softmax(const std::vector<double>& s, double tau,
                                        const std::vector<std::size_t>& idx) {
  long double m = -std::numeric_limits<long double>::infinity();
  for (auto i : idx) m = std::max(m, static_cast<long double>(s[i]) / tau);
  long double z = 0;
  std::vector<long double> out;
  for (auto i : idx) {
    out.push_back(std::exp(static_cast<long double>(s[i]) / tau - m));
    z += out.back();
  }
  for (auto& v : out) v /= z;
  return out;
}

// d/ds_k <softmax(s/tau), l> = p_k (l_k - <p,l>) / tau, in long double.
inline std::vector<long double> gradient(const std::vector<double>& s, double tau,
                                         const std::vector<std::size_t>& idx,
                                         const std::vector<double>& l) {
  const auto p = softmax(s, tau, idx);
  long double mean = 0;
  for (std::size_t k = 0; k < p.size(); ++k) mean += p[k] * l[k];
  std::vector<long double> g(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) g[k] = p[k] * (l[k] - mean) / tau;
  return g;
}

// Loss of a ranking: each round the first awake expert in `order` pays.
// Summed in double, in round order, which is the library's canonical order.
inline double ranking_loss(const riplm::LossHistory& h,
                           const std::vector<std::size_t>& order) {
  double total = 0;
  for (const auto& r : h.rounds)
    for (auto e : order)
      if (auto pos = r.awake.position(e)) {
        total += r.losses[*pos];
        break;
      }
  return total;
}

struct RankMin {
  double value;
  std::vector<std::size_t> order;  // lexicographically smallest minimizer
};

// Min over all N! orders by plain recursion (swap-based, not lexicographic).
inline RankMin brute_force_rank_min(const riplm::LossHistory& h) {
  std::vector<std::size_t> order(h.n_experts);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RankMin best{std::numeric_limits<double>::infinity(), {}};
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) {
      const double v = ranking_loss(h, order);
      if (v < best.value || (v == best.value && order < best.order)) best = {v, order};
      return;
    }
    for (std::size_t j = k; j < order.size(); ++j) {
      std::swap(order[k], order[j]);
      rec(k + 1);
      std::swap(order[k], order[j]);
    }
  };
  rec(0);
  return best;
}

// Random sleeping history; each expert awake w.p. q, empty rounds redrawn.
// Losses on a grid of 1/8 so sums are exact in double.
inline riplm::LossHistory random_history(std::mt19937_64& g, std::size_t n,
                                         std::size_t T, double q = 0.6,
                                         bool dyadic = false) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::uniform_int_distribution<int> eighths(0, 8);
  riplm::LossHistory h{n, {}};
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<std::size_t> m;
    while (m.empty())
      for (std::size_t i = 0; i < n; ++i)
        if (U(g) < q) m.push_back(i);
    std::vector<double> l;
    for (std::size_t k = 0; k < m.size(); ++k)
      l.push_back(dyadic ? eighths(g) / 8.0 : U(g));
    h.rounds.push_back({riplm::AwakeSet(m, n), l});
  }
  return h;
}

// Random point in the open simplex (normalized exponentials).
inline std::vector<double> random_simplex(std::mt19937_64& g, std::size_t n) {
  std::exponential_distribution<double> E(1.0);
  std::vector<double> w(n);
  double z = 0;
  for (auto& v : w) z += (v = E(g) + 1e-3);
  for (auto& v : w) v /= z;
  return w;
}

}  // namespace oracle
