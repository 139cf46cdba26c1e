#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riplm/harness/config.hpp"
#include "riplm/trial_log.hpp"

namespace riplm::harness {

struct CheckResult {
  std::string name;
  /// Trial the check ran on; unset for trial-independent checks.
  std::optional<std::uint64_t> seed;
  bool passed = true;
  /// Hard checks decide the exit status; soft ones are reported only.
  bool hard = true;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct DiagnosticReport {
  std::vector<CheckResult> checks;

  bool all_hard_passed() const;
  std::size_t failures() const;
};

/// Runs the diagnostics named in cfg.diagnostics over every trial.
/// Checks that do not apply to a trial (gradient checks on a learner without
/// gradients, the variance-budget probe outside the lower-bound environment,
/// the bound report under cooling) are skipped.
DiagnosticReport run_diagnostics(const std::vector<TrialLog>& logs,
                                 const ExperimentConfig& cfg);

nlohmann::json to_json(const CheckResult& c);

}  // namespace riplm::harness
