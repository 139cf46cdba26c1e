#include "riplm/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "riplm/history.hpp"

namespace riplm {

void HyperParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(eta)) throw std::invalid_argument("eta must be positive");
  if (!positive(delta)) throw std::invalid_argument("delta must be positive");
  if (!positive(tau_min)) throw std::invalid_argument("tau_min must be positive");
  if (!positive(cooling_c))
    throw std::invalid_argument("cooling_c must be positive");
  if (!(tau_init >= tau_min) || !std::isfinite(tau_init))
    throw std::invalid_argument("tau_init must be at least tau_min");
}

namespace {
Distribution prior_distribution(std::vector<double> weights) {
  // Size must be read before the vector is moved into the distribution.
  AwakeSet all = AwakeSet::all(weights.size());
  return Distribution(std::move(all), std::move(weights));
}
}  // namespace

Prior::Prior(std::vector<double> weights)
    : pi_(prior_distribution(std::move(weights))) {
  for (double p : pi_.probs())
    if (!(p > 0.0))
      throw std::invalid_argument("prior must be strictly positive");
}

Prior Prior::uniform(std::size_t n) {
  return Prior(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ExpertIndex sample(const Distribution& p, Rng& rng) {
  const double u = uniform01(rng);
  const auto probs = p.probs();
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return p.support()[k];
  }
  // u landed in the rounding slack above the last partial sum.
  for (std::size_t k = probs.size(); k-- > 0;)
    if (probs[k] > 0.0) return p.support()[k];
  return p.support()[0];
}

LearnerState init(std::size_t n_experts, const HyperParams& hp,
                  const std::optional<Prior>& prior) {
  if (n_experts < 2) throw std::invalid_argument("need at least two experts");
  hp.validate();
  LearnerState st{ScoreVector(n_experts, 0.0),
                  std::vector<double>(n_experts, 0.0),
                  Temperature(hp.tau_init, hp.tau_min), 0};
  if (prior) {
    if (prior->size() != n_experts)
      throw std::invalid_argument("prior length does not match N");
    for (std::size_t i = 0; i < n_experts; ++i)
      st.scores[i] = hp.tau_init * std::log((*prior)[i]);
  }
  return st;
}

Distribution play(const LearnerState& state, const AwakeSet& awake) {
  return restricted_softmax(state.scores, state.tau, awake);
}

std::vector<double> surrogate_gradient(const Distribution& p,
                                       std::span<const double> losses,
                                       Temperature tau) {
  validate_losses(p.support(), losses);
  const double mean = expected_loss(p, losses);
  const auto probs = p.probs();
  std::vector<double> g(probs.size());
  for (std::size_t k = 0; k < g.size(); ++k)
    g[k] = probs[k] / tau.value() * (losses[k] - mean);
  return g;
}

std::pair<LearnerState, RoundOutcome> update(const LearnerState& state,
                                             const HyperParams& hp,
                                             const AwakeSet& awake,
                                             std::span<const double> losses,
                                             ExpertIndex sampled_expert) {
  Distribution p = play(state, awake);
  validate_losses(awake, losses);

  RoundOutcome out{p, sampled_expert, expected_loss(p, losses), {}, {}, 0.0};
  const auto probs = p.probs();
  out.residuals.resize(awake.size());
  out.gradients.resize(awake.size());
  for (std::size_t k = 0; k < awake.size(); ++k) {
    const double r = losses[k] - out.mean_loss;
    out.residuals[k] = r;
    out.gradients[k] = probs[k] / state.tau.value() * r;
    out.variance_increment += probs[k] * r * r;
  }

  LearnerState next = state;
  for (std::size_t k = 0; k < awake.size(); ++k) {
    const ExpertIndex i = awake[k];
    const double g = out.gradients[k];
    next.accumulators[i] += g * g;
    next.scores[i] -= hp.eta * g / std::sqrt(next.accumulators[i] + hp.delta);
  }
  next.round += 1;
  next.tau = cool_temperature(state, hp, out);
  return {std::move(next), std::move(out)};
}

Temperature cool_temperature(const LearnerState& state, const HyperParams& hp,
                             const RoundOutcome& outcome) {
  if (!hp.cooling_enabled) return state.tau;
  return state.tau.with_value(
      hp.cooling_c / std::sqrt(outcome.variance_increment + hp.delta));
}

RiplmLearner::RiplmLearner(std::size_t n_experts, HyperParams hp,
                           std::optional<Prior> prior)
    : hp_(hp), state_(init(n_experts, hp, prior)) {}

Distribution RiplmLearner::play(const AwakeSet& awake) const {
  return riplm::play(state_, awake);
}

StepRecord RiplmLearner::step(const AwakeSet& awake,
                              std::span<const double> losses, Rng& rng) {
  const double tau = state_.tau.value();
  const ExpertIndex drawn = sample(play(awake), rng);
  auto [next, outcome] = update(state_, hp_, awake, losses, drawn);
  state_ = std::move(next);
  StepRecord rec{outcome.played, drawn, outcome.gradients, tau, 0};
  last_ = std::move(outcome);
  return rec;
}

LearnerSnapshot RiplmLearner::snapshot() const {
  return {state_.scores, state_.accumulators, state_.tau.value()};
}

}  // namespace riplm
