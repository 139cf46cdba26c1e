#include "riplm/variance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace riplm {

double round_variance(const Distribution& p, std::span<const double> losses) {
  const double mean = expected_loss(p, losses);
  const auto probs = p.probs();
  double v = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    const double r = losses[k] - mean;
    v += probs[k] * r * r;
  }
  return v;
}

double max_round_variance(std::span<const double> losses,
                          const AwakeSet& awake) {
  if (losses.size() != awake.size())
    throw std::invalid_argument("loss vector is not aligned with the awake set");
  const auto [lo, hi] = std::minmax_element(losses.begin(), losses.end());
  const double half_range = (*hi - *lo) / 2.0;
  return half_range * half_range;
}

void VarianceLedger::add(double variance, double max_variance) {
  v_t_ += variance;
  var_max_ += max_variance;
  per_round_.push_back({variance, max_variance});
  prefix_gap_.push_back(var_max_ - v_t_);
}

bool VarianceLedger::dominated_on_every_prefix(double slack) const {
  return std::all_of(prefix_gap_.begin(), prefix_gap_.end(),
                     [slack](double gap) { return gap >= -slack; });
}

VarianceLedger variance_ledger(const TrialLog& trial) {
  VarianceLedger ledger;
  for (const RoundRecord& rec : trial.rounds)
    ledger.add(round_variance(rec.played, rec.round.losses),
               max_round_variance(rec.round.losses, rec.round.awake));
  return ledger;
}

namespace {

// Calls fn(first, last) for each maximal run of rounds sharing an epoch.
template <typename Fn>
void for_each_epoch(const TrialLog& trial, Fn&& fn) {
  std::size_t start = 0;
  for (std::size_t t = 1; t <= trial.horizon(); ++t) {
    if (t == trial.horizon() ||
        trial.rounds[t].epoch != trial.rounds[start].epoch) {
      fn(start, t);
      start = t;
    }
  }
}

void require_gradients(const TrialLog& trial) {
  if (!trial.has_gradients())
    throw std::invalid_argument("trial carries no surrogate gradients");
}

}  // namespace

InequalityCheck telescoping_check(const TrialLog& trial, double delta) {
  require_gradients(trial);
  InequalityCheck out{0.0, 0.0, true};
  for_each_epoch(trial, [&](std::size_t first, std::size_t last) {
    std::vector<double> G(trial.n_experts, 0.0);
    double lhs = 0.0;
    for (std::size_t t = first; t < last; ++t) {
      const RoundRecord& rec = trial.rounds[t];
      for (std::size_t k = 0; k < rec.round.awake.size(); ++k) {
        const double g = rec.gradients[k];
        double& acc = G[rec.round.awake[k]];
        acc += g * g;
        lhs += g * g / std::sqrt(acc + delta);
      }
    }
    double rhs = 0.0;
    for (double acc : G) rhs += std::sqrt(acc + delta);
    rhs *= 2.0;
    out.lhs += lhs;
    out.rhs += rhs;
    out.holds = out.holds && lhs <= rhs + 1e-9;
  });
  return out;
}

InequalityCheck second_bound_check(const TrialLog& trial, double delta) {
  require_gradients(trial);
  const double tau0 = trial.rounds.front().temperature;
  const bool fixed = std::all_of(
      trial.rounds.begin(), trial.rounds.end(),
      [tau0](const RoundRecord& r) { return r.temperature == tau0; });
  const double tau = fixed ? tau0 : trial.tau_min;
  const double n = static_cast<double>(trial.n_experts);

  InequalityCheck out{0.0, 0.0, true};
  for_each_epoch(trial, [&](std::size_t first, std::size_t last) {
    std::vector<double> G(trial.n_experts, 0.0);
    double v = 0.0;
    for (std::size_t t = first; t < last; ++t) {
      const RoundRecord& rec = trial.rounds[t];
      for (std::size_t k = 0; k < rec.round.awake.size(); ++k)
        G[rec.round.awake[k]] += rec.gradients[k] * rec.gradients[k];
      v += rec.variance_increment;
    }
    double lhs = 0.0;
    for (double acc : G) lhs += std::sqrt(acc);
    const double rhs = std::sqrt(n) / tau * std::sqrt(v) + n * std::sqrt(delta);
    out.lhs += lhs;
    out.rhs += rhs;
    out.holds = out.holds && lhs <= rhs + 1e-9;
  });
  return out;
}

double kl_divergence(const Distribution& u, const Distribution& pi) {
  if (!(u.support() == pi.support()))
    throw std::invalid_argument("KL divergence needs a common support");
  const auto a = u.probs();
  const auto b = pi.probs();
  double kl = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) continue;
    if (b[k] == 0.0) return std::numeric_limits<double>::infinity();
    kl += a[k] * std::log(a[k] / b[k]);
  }
  return kl;
}

double log_partition(std::span<const double> scores, double tau) {
  const double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp((s - m) / tau);
  return m + tau * std::log(z);
}

BregmanKlResult bregman_kl_check(const Distribution& u, const Prior& prior,
                                 double tau) {
  const std::size_t n = prior.size();
  if (!(u.support() == AwakeSet::all(n)))
    throw std::invalid_argument("comparator must be supported on all experts");
  const Temperature temp(tau);
  const ScoreVector s1 =
      scores_from_distribution(prior.distribution(), temp, 0.0);
  // Any constant works for the comparator's scores; a nonzero one keeps the
  // translation invariance of the divergence in play.
  const ScoreVector su = scores_from_distribution(u, temp, 1.0);

  const Distribution grad = restricted_softmax(su, temp, AwakeSet::all(n));
  const auto g = grad.probs();
  double inner = 0.0;
  for (std::size_t i = 0; i < n; ++i) inner += g[i] * (s1[i] - su[i]);

  BregmanKlResult out;
  out.bregman = log_partition(s1, tau) - log_partition(su, tau) - inner;
  out.kl_scaled = tau * kl_divergence(u, prior.distribution());
  out.diff = std::abs(out.bregman - out.kl_scaled);
  return out;
}

BoundReport theorem1_bound_report(const TrialLog& trial, const Distribution& u,
                                  const Prior& prior, double C) {
  if (trial.rounds.empty()) throw std::invalid_argument("empty trial");
  const double tau = trial.rounds.front().temperature;
  for (const RoundRecord& r : trial.rounds)
    if (r.temperature != tau)
      throw std::invalid_argument(
          "bound report needs a fixed-temperature trial");
  if (!(u.support() == AwakeSet::all(trial.n_experts)))
    throw std::invalid_argument("comparator must be supported on all experts");
  for (double p : u.probs())
    if (!(p > 0.0))
      throw std::invalid_argument("comparator must be strictly positive");

  BoundReport rep;
  for (const RoundRecord& rec : trial.rounds) {
    const Distribution ut = restrict_comparator(u, rec.round.awake);
    rep.empirical_regret += expected_loss(rec.played, rec.round.losses) -
                            expected_loss(ut, rec.round.losses);
  }
  const double T = static_cast<double>(trial.horizon());
  const double lnln = std::log(std::log1p(T));
  rep.lnln_clamped = !(lnln > 0.0);
  rep.lnln_term = rep.lnln_clamped ? 0.0 : lnln;
  rep.kl_term = kl_divergence(u, prior.distribution());
  rep.sqrt_n_over_tau = std::sqrt(static_cast<double>(trial.n_experts)) / tau;
  rep.v_t = trial.cumulative_variance;
  rep.bound_value = C * rep.sqrt_n_over_tau *
                    std::sqrt(rep.v_t * (rep.kl_term + rep.lnln_term));
  if (rep.bound_value > 0.0)
    rep.ratio = rep.empirical_regret / rep.bound_value;
  else
    rep.ratio = rep.empirical_regret <= 0.0
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace riplm
