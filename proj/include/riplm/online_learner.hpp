#pragma once

#include <span>
#include <string>
#include <vector>

#include "riplm/pl_core.hpp"
#include "riplm/random.hpp"

namespace riplm {

/// What a learner reports about one round of play.
struct StepRecord {
  Distribution played;
  ExpertIndex sampled_expert = 0;
  /// Surrogate gradients aligned with the awake set; empty for learners
  /// that do not run a gradient update.
  std::vector<double> gradients;
  double temperature = 1.0;
  /// Restart counter (nonzero only under a restart wrapper).
  std::size_t epoch = 0;
};

/// End-of-trial state, for logging and checkpoint comparison.
struct LearnerSnapshot {
  std::vector<double> scores;
  std::vector<double> accumulators;
  double temperature = 1.0;
};

/// Uniform interface the harness drives every algorithm through.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;
  virtual std::size_t n_experts() const = 0;
  virtual Distribution play(const AwakeSet& awake) const = 0;
  /// play, sample, observe losses (aligned with awake), update.
  virtual StepRecord step(const AwakeSet& awake, std::span<const double> losses,
                          Rng& rng) = 0;
  virtual LearnerSnapshot snapshot() const = 0;
};

/// Inverse-CDF draw from p; returns an expert index in p.support().
ExpertIndex sample(const Distribution& p, Rng& rng);

}  // namespace riplm
