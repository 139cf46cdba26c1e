#pragma once

// Loss and availability generators: independent Bernoulli experts, the
// minimax lower-bound construction, and scripted sequences read from text.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "riplm/history.hpp"
#include "riplm/trial_log.hpp"

namespace riplm {

struct AlwaysAwake {
  bool operator==(const AlwaysAwake&) const = default;
};

/// Each expert awake independently with its own probability. A round that
/// comes up empty is redrawn.
struct IidAwake {
  std::vector<double> q;

  bool operator==(const IidAwake&) const = default;
};

struct StochasticEnvSpec {
  std::vector<double> means;
  std::variant<AlwaysAwake, IidAwake> availability = AlwaysAwake{};
  std::size_t horizon = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// l_{t,i} ~ Bernoulli(means_i), independent over (t, i).
LossHistory generate_stochastic(const StochasticEnvSpec& spec);

struct LowerBoundEnvSpec {
  std::size_t n_experts = 2;
  double eps_gap = 0.125;
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  /// Drawn uniformly from a seed-derived substream when unset.
  std::optional<std::size_t> i_star;

  void validate() const;
};

/// ceil(multiplier / eps^2).
std::size_t lower_bound_horizon(double eps_gap, double multiplier = 1.0);

/// All experts awake every round; mean 1/2 - eps for i_star, 1/2 + eps for
/// the rest. Returns the history and the distinguished expert.
std::pair<LossHistory, std::size_t> generate_lower_bound(
    const LowerBoundEnvSpec& spec);

/// (1/4 - eps^2) * sum_t (1 - sum_i p_t(i)^2).
double variance_budget_probe(const TrialLog& trial, double eps_gap);

/// Errors from reading a scripted history; `line` is 1-based, 0 when the
/// problem is not tied to a single line.
class ScriptParseError : public std::runtime_error {
 public:
  ScriptParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A fixed loss/availability sequence loaded from text. Format:
///
///   N=<int> T=<int>
///   awake=<i,j,...>; losses=<l_i,l_j,...>      (one line per round)
///
/// Blank lines and lines starting with '#' are ignored.
struct ScriptedEnv {
  LossHistory history;
};

ScriptedEnv parse_scripted(const std::string& text);
ScriptedEnv load_scripted(const std::filesystem::path& path);
/// Shortest round-trip formatting, so load(save(h)) == h bit for bit.
std::string format_scripted(const LossHistory& history);
void save_scripted(const LossHistory& history,
                   const std::filesystem::path& path);

}  // namespace riplm
