#include "riplm/harness/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "riplm/benchmarks.hpp"
#include "riplm/environments.hpp"
#include "riplm/format.hpp"
#include "riplm/gradcheck.hpp"
#include "riplm/variance.hpp"

namespace riplm::harness {

bool DiagnosticReport::all_hard_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed || !c.hard; });
}

std::size_t DiagnosticReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(),
                    [](const CheckResult& c) { return c.hard && !c.passed; }));
}

namespace {

CheckResult named(std::string name, std::optional<std::uint64_t> seed) {
  CheckResult c;
  c.name = std::move(name);
  c.seed = seed;
  return c;
}

bool wants(const ExperimentConfig& cfg, const std::string& name) {
  return std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), name) !=
         cfg.diagnostics.end();
}

CheckResult variance_domination(const TrialLog& log) {
  CheckResult c = named("variance_domination", log.seed);
  c.tolerance = 1e-12;
  double worst = -std::numeric_limits<double>::infinity();
  double v = 0.0, vmax = 0.0;
  std::size_t bad_rounds = 0;
  for (const RoundRecord& rec : log.rounds) {
    const double inc = round_variance(rec.played, rec.round.losses);
    const double cap = max_round_variance(rec.round.losses, rec.round.awake);
    if (inc > cap + c.tolerance) ++bad_rounds;
    v += inc;
    vmax += cap;
    worst = std::max(worst, v - vmax);
  }
  c.lhs = v;
  c.rhs = vmax;
  c.passed = bad_rounds == 0 && worst <= c.tolerance;
  c.detail = "max prefix (V_t - VARmax_t) = " + format_double(worst) +
             "; rounds over cap = " + std::to_string(bad_rounds);
  return c;
}

CheckResult consistency(const TrialLog& log) {
  CheckResult c = named("consistency", log.seed);
  c.tolerance = 1e-9;
  double recomputed = 0.0, folded = 0.0, centered = 0.0;
  for (const RoundRecord& rec : log.rounds) {
    recomputed += round_variance(rec.played, rec.round.losses);
    folded += rec.variance_increment;
    if (!rec.gradients.empty()) {
      double s = 0.0;
      for (double g : rec.gradients) s += g * rec.temperature;
      centered = std::max(centered, std::abs(s));
    }
  }
  c.lhs = std::max(std::abs(log.cumulative_variance - recomputed),
                   std::abs(log.cumulative_variance - folded));
  c.rhs = 0.0;
  c.passed = c.lhs <= c.tolerance && centered <= 1e-10;
  c.detail = "V_T logged " + format_double(log.cumulative_variance) +
             ", recomputed " + format_double(recomputed) +
             "; max |sum_i p_i r_i| = " + format_double(centered);
  return c;
}

CheckResult from_inequality(const std::string& name, const TrialLog& log,
                            const InequalityCheck& ic) {
  CheckResult c = named(name, log.seed);
  c.tolerance = 1e-9;
  c.lhs = ic.lhs;
  c.rhs = ic.rhs;
  c.passed = ic.holds;
  return c;
}

std::vector<CheckResult> pl_rank_gap(const TrialLog& log) {
  const LossHistory hist = log.history();
  const BenchmarkResult best = rank_benchmark(hist);
  const Ranking& sigma = std::get<Ranking>(best.argmin);
  std::vector<CheckResult> out;
  for (double t : {0.2, 0.5, 1.0}) {
    const Temperature tau(t);
    const auto gaps = empirical_pl_rank_gap(hist, sigma, tau);
    const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
    CheckResult c = named("pl_rank_gap", log.seed);
    c.tolerance = 1e-12;
    c.lhs = *hi;
    c.rhs = pl_rank_gap_bound(tau);
    c.passed = *hi <= c.rhs + c.tolerance;
    const auto negative =
        std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g < -c.tolerance; });
    c.detail = "tau=" + format_double(t) + " min gap " + format_double(*lo) +
               ", rounds with gap below -tol " + std::to_string(negative) +
               " (sigma from " + (best.exact ? "exact" : "heuristic") +
               " rank benchmark)";
    out.push_back(std::move(c));
  }
  return out;
}

std::optional<CheckResult> theorem1(const TrialLog& log,
                                    const ExperimentConfig& cfg) {
  const auto* algo = std::get_if<RiplmAlgorithm>(&cfg.algorithm);
  if (!algo || log.cooling || log.rounds.empty()) return std::nullopt;
  const Prior prior = algo->prior ? Prior(*algo->prior) : Prior::uniform(log.n_experts);
  const auto u = Distribution::uniform(AwakeSet::all(log.n_experts));
  BoundReport rep;
  try {
    rep = theorem1_bound_report(log, u, prior, cfg.bound_constant);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  CheckResult c = named("theorem1", log.seed);
  c.hard = false;
  c.lhs = rep.empirical_regret;
  c.rhs = rep.bound_value;
  c.passed = rep.empirical_regret <= rep.bound_value;
  c.detail = "comparator uniform; C=" + format_double(cfg.bound_constant) +
             " ratio " + format_double(rep.ratio) + " KL " +
             format_double(rep.kl_term) + " lnln " + format_double(rep.lnln_term) +
             (rep.lnln_clamped ? " (clamped)" : "") + " V_T " +
             format_double(rep.v_t);
  return c;
}

std::optional<CheckResult> variance_budget(const TrialLog& log,
                                           const ExperimentConfig& cfg) {
  const auto* env = std::get_if<LowerBoundEnvSpec>(&cfg.environment);
  if (!env) return std::nullopt;
  CheckResult c = named("variance_budget", log.seed);
  c.hard = false;
  c.lhs = log.cumulative_variance;
  c.rhs = variance_budget_probe(log, env->eps_gap);
  c.passed = c.lhs >= c.rhs;
  c.detail = "realized V_T vs (1/4 - eps^2) sum_t (1 - |p_t|^2)";
  return c;
}

}  // namespace

DiagnosticReport run_diagnostics(const std::vector<TrialLog>& logs,
                                 const ExperimentConfig& cfg) {
  DiagnosticReport rep;
  if (wants(cfg, "gradcheck")) {
    const auto s = gradient_check_sweep(cfg.gradcheck_instances,
                                        cfg.seeds.empty() ? 0 : cfg.seeds.front());
    CheckResult c = named("gradcheck", std::nullopt);
    c.lhs = s.max_relative_error;
    c.rhs = 1e-6;
    c.tolerance = 0.0;
    c.passed = s.max_relative_error <= 1e-6;
    c.detail = std::to_string(s.instances) + " instances, worst #" +
               std::to_string(s.worst_instance);
    rep.checks.push_back(std::move(c));
  }
  for (const TrialLog& log : logs) {
    if (wants(cfg, "variance_domination"))
      rep.checks.push_back(variance_domination(log));
    if (wants(cfg, "consistency")) rep.checks.push_back(consistency(log));
    if (log.has_gradients()) {
      if (wants(cfg, "telescoping"))
        rep.checks.push_back(from_inequality(
            "telescoping", log, telescoping_check(log, log.delta)));
      if (wants(cfg, "second_bound"))
        rep.checks.push_back(from_inequality(
            "second_bound", log, second_bound_check(log, log.delta)));
    }
    if (wants(cfg, "pl_rank_gap"))
      for (auto& c : pl_rank_gap(log)) rep.checks.push_back(std::move(c));
    if (wants(cfg, "theorem1") && log.has_gradients())
      if (auto c = theorem1(log, cfg)) rep.checks.push_back(std::move(*c));
    if (wants(cfg, "variance_budget"))
      if (auto c = variance_budget(log, cfg)) rep.checks.push_back(std::move(*c));
  }
  return rep;
}

nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j = {{"name", c.name},
                      {"passed", c.passed},
                      {"hard", c.hard},
                      {"lhs", c.lhs},
                      {"rhs", c.rhs},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}};
  j["seed"] = c.seed ? nlohmann::json(*c.seed) : nlohmann::json(nullptr);
  return j;
}

}  // namespace riplm::harness
