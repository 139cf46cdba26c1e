#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riplm/history.hpp"
#include "riplm/online_learner.hpp"
#include "riplm/pl_core.hpp"

namespace riplm {

struct RoundRecord {
  Round round;
  Distribution played;
  ExpertIndex sampled_expert = 0;
  /// Aligned with round.awake; empty for learners without gradients.
  std::vector<double> gradients;
  double variance_increment = 0.0;
  double max_variance_increment = 0.0;
  double expected_loss = 0.0;
  double temperature = 1.0;
  std::size_t epoch = 0;
};

/// Everything one trial produced, in round order.
struct TrialLog {
  std::uint64_t seed = 0;
  std::size_t n_experts = 0;
  std::string algorithm;
  /// Stabilizer and temperature floor the gradient learner ran with.
  double delta = 1e-6;
  double tau_min = 0.05;
  bool cooling = false;

  std::vector<RoundRecord> rounds;
  LearnerSnapshot final_state;

  double cumulative_variance = 0.0;      // V_T
  double cumulative_max_variance = 0.0;  // VAR_T^max
  double cumulative_expected_loss = 0.0;
  double cumulative_sampled_loss = 0.0;

  std::size_t horizon() const { return rounds.size(); }
  bool has_gradients() const {
    return !rounds.empty() && !rounds.front().gradients.empty();
  }

  LossHistory history() const;
  std::vector<Distribution> played() const;
};

}  // namespace riplm
