#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "riplm/harness/config.hpp"
#include "riplm/harness/diagnostics.hpp"
#include "riplm/trial_log.hpp"

namespace riplm::harness {

/// Column names of the per-trial CSV files, in order.
const std::vector<std::string>& trial_columns();

/// Schema document written next to the data files.
nlohmann::json output_schema();

/// Rounds (1-based) at which regret-to-date is computed: every ceil(T/100)
/// rounds and always the last round.
std::vector<std::size_t> regret_checkpoints(std::size_t horizon);

/// Per-trial CSV text. Regret-to-date is against the exact rank benchmark of
/// the history prefix when N <= 10 and against the heuristic otherwise
/// (benchmark_kind column); blank between checkpoints.
std::string format_trial_csv(const TrialLog& log);

/// "trial_<index>_seed_<seed>.csv"
std::string trial_file_name(std::size_t index, const TrialLog& log);

struct EmittedFiles {
  std::vector<std::filesystem::path> trials;
  std::filesystem::path summary;
  std::filesystem::path schema;
};

/// Writes the trial CSVs, summary.json and schema.json under `dir`
/// (created if needed). Only summary.json carries a timestamp. Throws
/// std::runtime_error naming the path on I/O failure.
EmittedFiles emit_results(const std::vector<TrialLog>& logs,
                          const DiagnosticReport& report,
                          const ExperimentConfig& cfg,
                          const std::filesystem::path& dir);

}  // namespace riplm::harness
