#include "riplm/harness/output.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "riplm/benchmarks.hpp"
#include "riplm/format.hpp"

namespace riplm::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Column {
  const char* name;
  const char* type;
  const char* description;
};

const std::vector<Column>& column_docs() {
  static const std::vector<Column> cols = {
      {"round", "int", "1-based round index t"},
      {"awake_count", "int", "|E_t|"},
      {"sampled_expert", "int", "expert drawn from p_t"},
      {"expected_loss", "real", "<p_t, l_t>"},
      {"sampled_loss", "real", "loss of the sampled expert"},
      {"cumulative_expected_loss", "real", "sum_{s<=t} <p_s, l_s>"},
      {"cumulative_v", "real",
       "V_t = sum_{s<=t} sum_i p_s(i) (l_{s,i} - <p_s, l_s>)^2"},
      {"cumulative_var_max", "real",
       "VAR_t^max = sum_{s<=t} ((max_i l_{s,i} - min_i l_{s,i}) / 2)^2"},
      {"temperature", "real", "temperature used to play round t"},
      {"epoch", "int", "learner restart counter (doubling wrapper)"},
      {"regret_to_date", "real|blank",
       "cumulative_expected_loss minus the rank benchmark of rounds 1..t; "
       "filled every ceil(T/100) rounds and on the last round"},
      {"benchmark_kind", "exact|heuristic|blank",
       "exact: exhaustive search (N <= 10); heuristic: local-search upper "
       "bound on the benchmark, so regret_to_date is a lower bound"},
  };
  return cols;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

const std::vector<std::string>& trial_columns() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& c : column_docs()) v.emplace_back(c.name);
    return v;
  }();
  return names;
}

json output_schema() {
  json cols = json::array();
  for (const auto& c : column_docs())
    cols.push_back({{"name", c.name}, {"type", c.type}, {"description", c.description}});
  return {
      {"trial_csv",
       {{"file_pattern", "trial_<index>_seed_<seed>.csv"},
        {"delimiter", ","},
        {"header", true},
        {"number_format", "shortest round-trip decimal"},
        {"columns", cols}}},
      {"summary_json",
       {{"file", "summary.json"},
        {"fields",
         {{"generated_at", "UTC timestamp; the only nondeterministic field"},
          {"config", "canonical experiment configuration"},
          {"trials", "per-trial totals and final regret"},
          {"diagnostics", "check results: name, seed, passed, hard, lhs, rhs, tolerance, detail"},
          {"all_hard_checks_passed", "bool"}}}}}};
}

std::vector<std::size_t> regret_checkpoints(std::size_t horizon) {
  std::vector<std::size_t> out;
  if (horizon == 0) return out;
  const std::size_t stride = (horizon + 99) / 100;
  for (std::size_t t = stride; t < horizon; t += stride) out.push_back(t);
  out.push_back(horizon);
  return out;
}

std::string format_trial_csv(const TrialLog& log) {
  std::string out;
  const auto& cols = trial_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (k) out += ',';
    out += cols[k];
  }
  out += '\n';

  const auto checkpoints = regret_checkpoints(log.horizon());
  std::size_t next_cp = 0;
  LossHistory prefix{log.n_experts, {}};
  double cum_loss = 0.0, cum_v = 0.0, cum_vmax = 0.0;
  for (std::size_t t = 0; t < log.horizon(); ++t) {
    const RoundRecord& rec = log.rounds[t];
    prefix.rounds.push_back(rec.round);
    cum_loss += rec.expected_loss;
    cum_v += rec.variance_increment;
    cum_vmax += rec.max_variance_increment;
    const double sampled_loss =
        rec.round.losses[*rec.round.awake.position(rec.sampled_expert)];

    std::string regret_cell, kind_cell;
    if (next_cp < checkpoints.size() && checkpoints[next_cp] == t + 1) {
      const BenchmarkResult b = rank_benchmark(prefix);
      regret_cell = format_double(cum_loss - b.value);
      kind_cell = b.exact ? "exact" : "heuristic";
      ++next_cp;
    }

    out += std::to_string(t + 1) + ',' + std::to_string(rec.round.awake.size()) +
           ',' + std::to_string(rec.sampled_expert) + ',' +
           format_double(rec.expected_loss) + ',' + format_double(sampled_loss) +
           ',' + format_double(cum_loss) + ',' + format_double(cum_v) + ',' +
           format_double(cum_vmax) + ',' + format_double(rec.temperature) + ',' +
           std::to_string(rec.epoch) + ',' + regret_cell + ',' + kind_cell + '\n';
  }
  return out;
}

std::string trial_file_name(std::size_t index, const TrialLog& log) {
  return "trial_" + std::to_string(index) + "_seed_" + std::to_string(log.seed) +
         ".csv";
}

EmittedFiles emit_results(const std::vector<TrialLog>& logs,
                          const DiagnosticReport& report,
                          const ExperimentConfig& cfg, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  EmittedFiles files;
  json trials = json::array();
  for (std::size_t k = 0; k < logs.size(); ++k) {
    const TrialLog& log = logs[k];
    const fs::path p = dir / trial_file_name(k, log);
    write_file(p, format_trial_csv(log));
    files.trials.push_back(p);

    const BenchmarkResult b = rank_benchmark(log.history());
    trials.push_back({{"seed", log.seed},
                      {"file", p.filename().string()},
                      {"algorithm", log.algorithm},
                      {"n_experts", log.n_experts},
                      {"horizon", log.horizon()},
                      {"cumulative_expected_loss", log.cumulative_expected_loss},
                      {"cumulative_sampled_loss", log.cumulative_sampled_loss},
                      {"v_t", log.cumulative_variance},
                      {"var_max", log.cumulative_max_variance},
                      {"rank_benchmark", b.value},
                      {"rank_benchmark_exact", b.exact},
                      {"final_regret", log.cumulative_expected_loss - b.value}});
  }

  json checks = json::array();
  for (const auto& c : report.checks) checks.push_back(to_json(c));
  json summary = {{"generated_at", timestamp_utc()},
                  {"config", to_json(cfg)},
                  {"trials", trials},
                  {"diagnostics", checks},
                  {"all_hard_checks_passed", report.all_hard_passed()}};
  files.summary = dir / "summary.json";
  write_file(files.summary, summary.dump(2) + "\n");

  files.schema = dir / "schema.json";
  write_file(files.schema, output_schema().dump(2) + "\n");
  return files;
}

}  // namespace riplm::harness
