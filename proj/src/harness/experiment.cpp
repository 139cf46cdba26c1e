#include "riplm/harness/experiment.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <optional>

#include "riplm/baselines.hpp"
#include "riplm/environments.hpp"
#include "riplm/variance.hpp"

namespace riplm::harness {

// ---------------------------------------------------------------------------
// Restart wrapper

DoublingRiplm::DoublingRiplm(std::size_t n_experts, HyperParams hp,
                             std::optional<Prior> prior)
    : base_(hp), prior_(std::move(prior)), inner_([&] {
        HyperParams first = hp;
        first.eta = epoch_eta(n_experts, hp.tau_init, 1.0);
        return RiplmLearner(n_experts, first, prior_);
      }()) {}

double DoublingRiplm::epoch_eta(std::size_t n_experts, double tau,
                                double budget) {
  const double n = static_cast<double>(n_experts);
  return tau * std::sqrt(std::log(n) / (2.0 * std::sqrt(n) * std::sqrt(budget)));
}

StepRecord DoublingRiplm::step(const AwakeSet& awake,
                               std::span<const double> losses, Rng& rng) {
  StepRecord rec = inner_.step(awake, losses, rng);
  rec.epoch = epoch_;
  v_t_ += inner_.last_outcome().variance_increment;
  if (v_t_ > budget_) {
    while (v_t_ > budget_) {
      budget_ *= 4.0;
      ++epoch_;
    }
    HyperParams next = base_;
    next.eta = epoch_eta(n_experts(), base_.tau_init, budget_);
    inner_ = RiplmLearner(n_experts(), next, prior_);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Trials

LossHistory build_history(const EnvironmentSpec& env, std::uint64_t seed) {
  return std::visit(
      [seed](const auto& e) -> LossHistory {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, StochasticEnvSpec>) {
          StochasticEnvSpec s = e;
          s.seed = seed;
          return generate_stochastic(s);
        } else if constexpr (std::is_same_v<E, LowerBoundEnvSpec>) {
          LowerBoundEnvSpec s = e;
          s.seed = seed;
          return generate_lower_bound(s).first;
        } else {
          return load_scripted(e.path).history;
        }
      },
      env);
}

std::unique_ptr<OnlineLearner> make_learner(const AlgorithmSpec& algo,
                                            std::size_t n_experts,
                                            std::size_t horizon) {
  return std::visit(
      [&](const auto& a) -> std::unique_ptr<OnlineLearner> {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, RiplmAlgorithm>) {
          std::optional<Prior> prior;
          if (a.prior) prior.emplace(*a.prior);
          if (a.doubling)
            return std::make_unique<DoublingRiplm>(n_experts, a.hp, prior);
          return std::make_unique<RiplmLearner>(n_experts, a.hp, prior);
        } else if constexpr (std::is_same_v<A, HedgeAlgorithm>) {
          return std::make_unique<HedgeLearner>(
              n_experts,
              a.learning_rate.value_or(hedge_default_rate(n_experts, horizon)));
        } else {
          return std::make_unique<UniformLearner>(n_experts);
        }
      },
      algo);
}

TrialLog run_trial(const LossHistory& hist, OnlineLearner& learner,
                   std::uint64_t seed) {
  hist.validate();
  TrialLog log;
  log.seed = seed;
  log.n_experts = hist.n_experts;
  log.algorithm = learner.name();
  if (const auto* r = dynamic_cast<const RiplmLearner*>(&learner)) {
    log.delta = r->hyper_params().delta;
    log.tau_min = r->hyper_params().tau_min;
    log.cooling = r->hyper_params().cooling_enabled;
  } else if (const auto* d = dynamic_cast<const DoublingRiplm*>(&learner)) {
    log.delta = d->current().hyper_params().delta;
    log.tau_min = d->current().hyper_params().tau_min;
    log.cooling = d->current().hyper_params().cooling_enabled;
  }

  Rng rng = make_stream(seed, {stream::kSampling});
  log.rounds.reserve(hist.horizon());
  for (const Round& r : hist.rounds) {
    StepRecord step = learner.step(r.awake, r.losses, rng);
    RoundRecord rec{r,
                    std::move(step.played),
                    step.sampled_expert,
                    std::move(step.gradients),
                    0.0,
                    0.0,
                    0.0,
                    step.temperature,
                    step.epoch};
    rec.variance_increment = round_variance(rec.played, r.losses);
    rec.max_variance_increment = max_round_variance(r.losses, r.awake);
    rec.expected_loss = expected_loss(rec.played, r.losses);
    log.cumulative_variance += rec.variance_increment;
    log.cumulative_max_variance += rec.max_variance_increment;
    log.cumulative_expected_loss += rec.expected_loss;
    log.cumulative_sampled_loss += r.losses[*r.awake.position(rec.sampled_expert)];
    log.rounds.push_back(std::move(rec));
  }
  log.final_state = learner.snapshot();
  return log;
}

TrialLog run_trial(const ExperimentConfig& cfg, std::uint64_t seed) {
  const LossHistory hist = build_history(cfg.environment, seed);
  auto learner = make_learner(cfg.algorithm, hist.n_experts, hist.horizon());
  return run_trial(hist, *learner, seed);
}

namespace {

// Scripted histories are read once and shared by every trial.
std::optional<LossHistory> shared_history(const ExperimentConfig& cfg) {
  if (const auto* s = std::get_if<ScriptedEnvSpec>(&cfg.environment))
    return load_scripted(s->path).history;
  return std::nullopt;
}

TrialLog run_one(const ExperimentConfig& cfg,
                 const std::optional<LossHistory>& shared, std::uint64_t seed) {
  if (!shared) return run_trial(cfg, seed);
  auto learner = make_learner(cfg.algorithm, shared->n_experts, shared->horizon());
  return run_trial(*shared, *learner, seed);
}

}  // namespace

std::vector<TrialLog> run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  const auto shared = shared_history(cfg);
  const std::size_t n = cfg.seeds.size();
  std::vector<TrialLog> logs(n);
  std::vector<std::exception_ptr> errors(n);

#pragma omp parallel for schedule(dynamic, 1) num_threads(workers > 0 ? workers : 1)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
    try {
      logs[k] = run_one(cfg, shared, cfg.seeds[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return logs;
}

std::vector<TrialLog> run_experiment_serial(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto shared = shared_history(cfg);
  std::vector<TrialLog> logs;
  logs.reserve(cfg.seeds.size());
  for (auto seed : cfg.seeds) logs.push_back(run_one(cfg, shared, seed));
  return logs;
}

}  // namespace riplm::harness
