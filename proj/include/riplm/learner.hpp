#pragma once

// RIPLM: Plackett-Luce play over the awake set, exact surrogate gradient,
// diagonal AdaGrad on the scores and optional variance-driven cooling.

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "riplm/online_learner.hpp"
#include "riplm/pl_core.hpp"

namespace riplm {

struct HyperParams {
  double eta = 1.0;
  double delta = 1e-6;
  double tau_init = 1.0;
  double tau_min = 0.05;
  double cooling_c = 1.0;
  bool cooling_enabled = false;

  /// Throws std::invalid_argument on eta, delta, cooling_c <= 0 or
  /// tau_init < tau_min or tau_min <= 0.
  void validate() const;

  bool operator==(const HyperParams&) const = default;
};

/// Strictly positive distribution over all N experts.
class Prior {
 public:
  explicit Prior(std::vector<double> weights);
  static Prior uniform(std::size_t n);

  const Distribution& distribution() const { return pi_; }
  std::size_t size() const { return pi_.size(); }
  double operator[](ExpertIndex i) const { return pi_.probs()[i]; }

 private:
  Distribution pi_;
};

struct LearnerState {
  ScoreVector scores;
  std::vector<double> accumulators;
  Temperature tau;
  std::size_t round = 0;

  bool operator==(const LearnerState&) const = default;
};

struct RoundOutcome {
  Distribution played;
  ExpertIndex sampled_expert = 0;
  double mean_loss = 0.0;
  /// Aligned with played.support().
  std::vector<double> residuals;
  std::vector<double> gradients;
  double variance_increment = 0.0;
};

/// s_i = tau_init * log(pi_i) with a prior, zero otherwise; G = 0.
LearnerState init(std::size_t n_experts, const HyperParams& hp,
                  const std::optional<Prior>& prior = std::nullopt);

Distribution play(const LearnerState& state, const AwakeSet& awake);

/// g_i = (p_i / tau) (l_i - <p, l>), aligned with p.support().
std::vector<double> surrogate_gradient(const Distribution& p,
                                       std::span<const double> losses,
                                       Temperature tau);

/// One RIPLM round: G_i += g_i^2 then s_i -= eta g_i / sqrt(G_i + delta) for
/// awake i, then cooling if enabled. Asleep coordinates are untouched.
std::pair<LearnerState, RoundOutcome> update(const LearnerState& state,
                                             const HyperParams& hp,
                                             const AwakeSet& awake,
                                             std::span<const double> losses,
                                             ExpertIndex sampled_expert = 0);

/// max(tau_min, c / sqrt(variance_increment + delta)); unchanged when cooling
/// is disabled.
Temperature cool_temperature(const LearnerState& state, const HyperParams& hp,
                             const RoundOutcome& outcome);

class RiplmLearner final : public OnlineLearner {
 public:
  RiplmLearner(std::size_t n_experts, HyperParams hp,
               std::optional<Prior> prior = std::nullopt);

  std::string name() const override { return "riplm"; }
  std::size_t n_experts() const override { return state_.scores.size(); }
  Distribution play(const AwakeSet& awake) const override;
  StepRecord step(const AwakeSet& awake, std::span<const double> losses,
                  Rng& rng) override;
  LearnerSnapshot snapshot() const override;

  const LearnerState& state() const { return state_; }
  const HyperParams& hyper_params() const { return hp_; }
  const RoundOutcome& last_outcome() const { return *last_; }

 private:
  HyperParams hp_;
  LearnerState state_;
  std::optional<RoundOutcome> last_;
};

}  // namespace riplm
