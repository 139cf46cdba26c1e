#pragma once

// Reference learners: awake-restricted Hedge and uniform play.

#include <cmath>
#include <span>
#include <vector>

#include "riplm/online_learner.hpp"

namespace riplm {

struct HedgeState {
  std::vector<double> log_weights;
  double learning_rate = 1.0;

  bool operator==(const HedgeState&) const = default;
};

HedgeState hedge_init(std::size_t n_experts, double learning_rate);

/// Standard rate sqrt(8 ln N / T) for a known horizon.
inline double hedge_default_rate(std::size_t n_experts, std::size_t horizon) {
  return std::sqrt(8.0 * std::log(static_cast<double>(n_experts)) /
                   static_cast<double>(horizon));
}

/// Softmax of the log-weights on `awake` at unit temperature.
Distribution hedge_play(const HedgeState& state, const AwakeSet& awake);

/// log_w_i -= rate * l_i for awake i only.
HedgeState hedge_update(const HedgeState& state, const AwakeSet& awake,
                        std::span<const double> losses);

Distribution uniform_play(const AwakeSet& awake);

class HedgeLearner final : public OnlineLearner {
 public:
  HedgeLearner(std::size_t n_experts, double learning_rate)
      : state_(hedge_init(n_experts, learning_rate)) {}

  std::string name() const override { return "hedge"; }
  std::size_t n_experts() const override { return state_.log_weights.size(); }
  Distribution play(const AwakeSet& awake) const override {
    return hedge_play(state_, awake);
  }
  StepRecord step(const AwakeSet& awake, std::span<const double> losses,
                  Rng& rng) override;
  LearnerSnapshot snapshot() const override {
    return {state_.log_weights, {}, 1.0};
  }

  const HedgeState& state() const { return state_; }

 private:
  HedgeState state_;
};

class UniformLearner final : public OnlineLearner {
 public:
  explicit UniformLearner(std::size_t n_experts) : n_(n_experts) {}

  std::string name() const override { return "uniform"; }
  std::size_t n_experts() const override { return n_; }
  Distribution play(const AwakeSet& awake) const override {
    return uniform_play(awake);
  }
  StepRecord step(const AwakeSet& awake, std::span<const double> losses,
                  Rng& rng) override;
  LearnerSnapshot snapshot() const override { return {{}, {}, 1.0}; }

 private:
  std::size_t n_;
};

}  // namespace riplm
