#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "riplm/harness/config.hpp"
#include "riplm/history.hpp"
#include "riplm/learner.hpp"
#include "riplm/online_learner.hpp"
#include "riplm/trial_log.hpp"

namespace riplm::harness {

/// RIPLM restarted from scratch each time cumulative V_T crosses the next
/// power of 4. Epoch k assumes a variance budget B_k = 4^k and uses
/// eta_k = tau * sqrt(ln N / (2 sqrt(N) sqrt(B_k))), which balances the
/// initial divergence tau ln N against 2 (sqrt(N)/tau) sqrt(B_k).
class DoublingRiplm final : public OnlineLearner {
 public:
  DoublingRiplm(std::size_t n_experts, HyperParams hp,
                std::optional<Prior> prior = std::nullopt);

  static double epoch_eta(std::size_t n_experts, double tau, double budget);

  std::string name() const override { return "riplm_doubling"; }
  std::size_t n_experts() const override { return inner_.n_experts(); }
  Distribution play(const AwakeSet& awake) const override {
    return inner_.play(awake);
  }
  StepRecord step(const AwakeSet& awake, std::span<const double> losses,
                  Rng& rng) override;
  LearnerSnapshot snapshot() const override { return inner_.snapshot(); }

  std::size_t epoch() const { return epoch_; }
  const RiplmLearner& current() const { return inner_; }

 private:
  HyperParams base_;
  std::optional<Prior> prior_;
  std::size_t epoch_ = 0;
  double budget_ = 1.0;
  double v_t_ = 0.0;
  RiplmLearner inner_;
};

/// The loss sequence a trial with this seed plays against.
LossHistory build_history(const EnvironmentSpec& env, std::uint64_t seed);

std::unique_ptr<OnlineLearner> make_learner(const AlgorithmSpec& algo,
                                            std::size_t n_experts,
                                            std::size_t horizon);

/// Plays `learner` through `hist`; sampling draws come from the trial seed's
/// own substream.
TrialLog run_trial(const LossHistory& hist, OnlineLearner& learner,
                   std::uint64_t seed);

TrialLog run_trial(const ExperimentConfig& cfg, std::uint64_t seed);

/// One TrialLog per seed, in seed order. Trials run on up to `workers`
/// OpenMP threads; output does not depend on the worker count.
std::vector<TrialLog> run_experiment(const ExperimentConfig& cfg,
                                     int workers = 1);

/// Serial reference for run_experiment.
std::vector<TrialLog> run_experiment_serial(const ExperimentConfig& cfg);

}  // namespace riplm::harness
