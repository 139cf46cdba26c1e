#pragma once

// Experiment configuration: a JSON document with nested sections. Unknown
// keys are rejected, and every error names the offending field path.
//
//   {
//     "environment": { "type": "stochastic", "means": [..], "horizon": T,
//                      "availability": {"type": "always"} |
//                                      {"type": "iid", "q": 0.7 | [..]} }
//                  | { "type": "lower_bound", "n_experts": N,
//                      "eps_gap": 0.125, "horizon": T | "horizon_multiplier": k,
//                      "i_star": i }
//                  | { "type": "scripted", "path": "file.txt" },
//     "algorithm":   { "type": "riplm", "eta": 1, "delta": 1e-6,
//                      "tau_init": 1, "tau_min": 0.05, "cooling_c": 1,
//                      "cooling": false, "doubling": false, "prior": [..] }
//                  | { "type": "hedge", "learning_rate": r }
//                  | { "type": "uniform" },
//     "seeds": [1, 2, 3],
//     "diagnostics": ["variance_domination", ...],
//     "bound_constant": 10,
//     "gradcheck_instances": 1000,
//     "output": "out"
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "riplm/environments.hpp"
#include "riplm/learner.hpp"

namespace riplm::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what) {}
};

struct ScriptedEnvSpec {
  std::filesystem::path path;
};

/// Seeds of generated environments are replaced by each trial's seed.
using EnvironmentSpec =
    std::variant<StochasticEnvSpec, LowerBoundEnvSpec, ScriptedEnvSpec>;

struct RiplmAlgorithm {
  HyperParams hp;
  std::optional<std::vector<double>> prior;
  /// Restart with a retuned eta whenever cumulative V_T crosses a power of 4.
  bool doubling = false;
};

struct HedgeAlgorithm {
  /// sqrt(8 ln N / T) when unset.
  std::optional<double> learning_rate;
};

struct UniformAlgorithm {};

using AlgorithmSpec =
    std::variant<RiplmAlgorithm, HedgeAlgorithm, UniformAlgorithm>;

/// Registered diagnostic names.
const std::vector<std::string>& diagnostic_names();

struct ExperimentConfig {
  EnvironmentSpec environment;
  AlgorithmSpec algorithm = RiplmAlgorithm{};
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> diagnostics;
  double bound_constant = 10.0;
  std::size_t gradcheck_instances = 1000;
  std::filesystem::path output = "out";

  /// Throws ConfigError.
  void validate() const;
};

/// Relative scripted paths resolve against `base_dir`.
ExperimentConfig parse_config(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form (used in the run summary).
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Comma-separated seed list, e.g. "1,2,3" or "1-10".
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace riplm::harness
