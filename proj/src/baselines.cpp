#include "riplm/baselines.hpp"

#include <stdexcept>

#include "riplm/history.hpp"

namespace riplm {

HedgeState hedge_init(std::size_t n_experts, double learning_rate) {
  if (n_experts == 0) throw std::invalid_argument("need at least one expert");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("hedge learning rate must be positive");
  return {std::vector<double>(n_experts, 0.0), learning_rate};
}

Distribution hedge_play(const HedgeState& state, const AwakeSet& awake) {
  return restricted_softmax(state.log_weights, Temperature(1.0), awake);
}

HedgeState hedge_update(const HedgeState& state, const AwakeSet& awake,
                        std::span<const double> losses) {
  validate_losses(awake, losses);
  HedgeState next = state;
  for (std::size_t k = 0; k < awake.size(); ++k)
    next.log_weights[awake[k]] -= state.learning_rate * losses[k];
  return next;
}

Distribution uniform_play(const AwakeSet& awake) {
  return Distribution::uniform(awake);
}

StepRecord HedgeLearner::step(const AwakeSet& awake,
                              std::span<const double> losses, Rng& rng) {
  Distribution p = play(awake);
  const ExpertIndex drawn = sample(p, rng);
  state_ = hedge_update(state_, awake, losses);
  return {std::move(p), drawn, {}, 1.0, 0};
}

StepRecord UniformLearner::step(const AwakeSet& awake,
                                std::span<const double> losses, Rng& rng) {
  validate_losses(awake, losses);
  Distribution p = uniform_play(awake);
  const ExpertIndex drawn = sample(p, rng);
  return {std::move(p), drawn, {}, 1.0, 0};
}

}  // namespace riplm
