#pragma once

// Second-order bookkeeping and the numeric checks of the regret analysis:
// variance domination, AdaGrad telescoping, the Bregman/KL identity at
// initialization and the fixed-temperature bound report.

#include <span>
#include <vector>

#include "riplm/learner.hpp"
#include "riplm/pl_core.hpp"
#include "riplm/trial_log.hpp"

namespace riplm {

/// sum_i p_i (l_i - <p, l>)^2, losses aligned with p.support().
double round_variance(const Distribution& p, std::span<const double> losses);

/// Largest round_variance over all distributions on `awake`:
/// ((max l - min l) / 2)^2, attained by splitting mass evenly between the
/// two extreme experts.
double max_round_variance(std::span<const double> losses,
                          const AwakeSet& awake);

/// Running V_T and VAR_T^max.
class VarianceLedger {
 public:
  struct Entry {
    double variance;
    double max_variance;
  };

  void add(double variance, double max_variance);

  double v_t() const { return v_t_; }
  double var_max() const { return var_max_; }
  const std::vector<Entry>& per_round() const { return per_round_; }
  /// True iff V_t <= VAR_t^max + slack for every prefix t.
  bool dominated_on_every_prefix(double slack = 1e-12) const;

 private:
  double v_t_ = 0.0;
  double var_max_ = 0.0;
  std::vector<Entry> per_round_;
  std::vector<double> prefix_gap_;  // VAR^max_t - V_t
};

VarianceLedger variance_ledger(const TrialLog& trial);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// sum_t sum_i g_{t,i}^2 / sqrt(G_{t,i} + delta) <= 2 sum_i sqrt(G_{T,i} + delta)
/// with G_{t,i} the accumulator after round t's gradient is added. The
/// accumulators are rebuilt from the logged gradients; a learner restart
/// (epoch change) starts a fresh sum, and lhs/rhs are totals over epochs.
InequalityCheck telescoping_check(const TrialLog& trial, double delta);

/// sum_i sqrt(G_{T,i}) <= (sqrt(N) / tau) sqrt(V_T) + N sqrt(delta), per
/// epoch, where tau is the fixed temperature, or tau_min when it varied.
InequalityCheck second_bound_check(const TrialLog& trial, double delta);

struct BregmanKlResult {
  double bregman = 0.0;
  double kl_scaled = 0.0;
  double diff = 0.0;
};

/// KL(u || pi) for u, pi on the same support of size N.
double kl_divergence(const Distribution& u, const Distribution& pi);

/// Bregman divergence of Psi(s) = tau log sum_j exp(s_j / tau) between the
/// initial scores tau log(pi) and the scores that map to u, against
/// tau * KL(u || pi). u must be strictly positive on all N experts.
BregmanKlResult bregman_kl_check(const Distribution& u, const Prior& prior,
                                 double tau);

/// Log-partition potential tau * log sum_j exp(s_j / tau) over all experts.
double log_partition(std::span<const double> scores, double tau);

struct BoundReport {
  double empirical_regret = 0.0;
  double bound_value = 0.0;
  double ratio = 0.0;
  double kl_term = 0.0;
  /// max(0, ln ln(1 + T)); clamped because it is negative for T <= 2.
  double lnln_term = 0.0;
  bool lnln_clamped = false;
  double sqrt_n_over_tau = 0.0;
  double v_t = 0.0;
};

/// Fixed-temperature regret against the comparator u (restricted to each
/// round's awake set) next to C (sqrt N / tau) sqrt(V_T (KL(u||pi) + ln ln(1+T))).
/// Throws if the trial's temperature varied.
BoundReport theorem1_bound_report(const TrialLog& trial, const Distribution& u,
                                  const Prior& prior, double C = 10.0);

}  // namespace riplm
