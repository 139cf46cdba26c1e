#include "riplm/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "riplm/format.hpp"
#include "riplm/random.hpp"

namespace riplm {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

std::vector<ExpertIndex> draw_awake(const std::vector<double>& q, Rng& rng) {
  std::vector<ExpertIndex> awake;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (uniform01(rng) < q[i]) awake.push_back(i);
  return awake;
}

}  // namespace

// ---------------------------------------------------------------------------
// Stochastic experts

void StochasticEnvSpec::validate() const {
  if (means.empty()) throw std::invalid_argument("means must be nonempty");
  for (double m : means)
    if (!in_unit_interval(m))
      throw std::invalid_argument("means must lie in [0,1]");
  if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (const auto* iid = std::get_if<IidAwake>(&availability)) {
    if (iid->q.size() != means.size())
      throw std::invalid_argument(
          "availability probabilities must have one entry per expert");
    for (double q : iid->q)
      if (!(q > 0.0 && q <= 1.0))
        throw std::invalid_argument("availability probabilities must lie in (0,1]");
  }
}

LossHistory generate_stochastic(const StochasticEnvSpec& spec) {
  spec.validate();
  const std::size_t n = spec.means.size();
  Rng loss_rng = make_stream(spec.seed, {stream::kLosses});
  Rng avail_rng = make_stream(spec.seed, {stream::kAvailability});
  Rng retry_rng = make_stream(spec.seed, {stream::kAwakeRetry});
  const auto* iid = std::get_if<IidAwake>(&spec.availability);

  LossHistory h{n, {}};
  h.rounds.reserve(spec.horizon);
  std::vector<double> all(n);
  for (std::size_t t = 0; t < spec.horizon; ++t) {
    // Losses are drawn for every expert so availability never shifts them.
    for (std::size_t i = 0; i < n; ++i)
      all[i] = uniform01(loss_rng) < spec.means[i] ? 1.0 : 0.0;

    std::vector<ExpertIndex> members;
    if (iid) {
      members = draw_awake(iid->q, avail_rng);
      while (members.empty()) members = draw_awake(iid->q, retry_rng);
    } else {
      members.resize(n);
      for (std::size_t i = 0; i < n; ++i) members[i] = i;
    }
    std::vector<double> losses;
    losses.reserve(members.size());
    for (ExpertIndex i : members) losses.push_back(all[i]);
    h.rounds.push_back({AwakeSet(std::move(members), n), std::move(losses)});
  }
  return h;
}

// ---------------------------------------------------------------------------
// Lower-bound construction

void LowerBoundEnvSpec::validate() const {
  if (n_experts < 2) throw std::invalid_argument("need at least two experts");
  if (!(eps_gap > 0.0 && eps_gap <= 0.125))
    throw std::invalid_argument("eps_gap must lie in (0, 1/8]");
  if (horizon == 0) throw std::invalid_argument("horizon must be >= 1");
  if (i_star && *i_star >= n_experts)
    throw std::invalid_argument("i_star out of range");
}

std::size_t lower_bound_horizon(double eps_gap, double multiplier) {
  if (!(eps_gap > 0.0) || !(multiplier > 0.0))
    throw std::invalid_argument("eps_gap and multiplier must be positive");
  return static_cast<std::size_t>(std::ceil(multiplier / (eps_gap * eps_gap)));
}

std::pair<LossHistory, std::size_t> generate_lower_bound(
    const LowerBoundEnvSpec& spec) {
  spec.validate();
  std::size_t star = 0;
  if (spec.i_star) {
    star = *spec.i_star;
  } else {
    Rng pick = make_stream(spec.seed, {stream::kDistinguished});
    star = static_cast<std::size_t>(uniform_index(pick, spec.n_experts));
  }
  StochasticEnvSpec inner;
  inner.means.assign(spec.n_experts, 0.5 + spec.eps_gap);
  inner.means[star] = 0.5 - spec.eps_gap;
  inner.horizon = spec.horizon;
  inner.seed = spec.seed;
  return {generate_stochastic(inner), star};
}

double variance_budget_probe(const TrialLog& trial, double eps_gap) {
  double total = 0.0;
  for (const RoundRecord& rec : trial.rounds) {
    double sq = 0.0;
    for (double p : rec.played.probs()) sq += p * p;
    total += 1.0 - sq;
  }
  return (0.25 - eps_gap * eps_gap) * total;
}

// ---------------------------------------------------------------------------
// Scripted histories

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Parses "key=value" and returns value; throws if the key differs.
std::string_view field(std::string_view item, std::string_view key,
                       std::size_t line) {
  const auto eq = item.find('=');
  if (eq == std::string_view::npos || trim(item.substr(0, eq)) != key)
    throw ScriptParseError(line, "expected '" + std::string(key) + "=...'");
  return trim(item.substr(eq + 1));
}

}  // namespace

ScriptedEnv parse_scripted(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> n, horizon;
  LossHistory h;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (!n) {
      const auto parts = split(line, ' ');
      std::vector<std::string_view> tokens;
      for (auto p : parts)
        if (!p.empty()) tokens.push_back(p);
      if (tokens.size() != 2)
        throw ScriptParseError(line_no, "header must be 'N=<int> T=<int>'");
      n = parse_int<std::size_t>(field(tokens[0], "N", line_no));
      horizon = parse_int<std::size_t>(field(tokens[1], "T", line_no));
      if (!n || !horizon)
        throw ScriptParseError(line_no, "header must be 'N=<int> T=<int>'");
      if (*n == 0) throw ScriptParseError(line_no, "N must be >= 1");
      if (*horizon == 0) throw ScriptParseError(line_no, "horizon must be >= 1");
      h.n_experts = *n;
      continue;
    }

    const std::size_t t = h.rounds.size() + 1;
    const std::string round_tag = "round " + std::to_string(t) + ": ";
    const auto parts = split(line, ';');
    if (parts.size() != 2)
      throw ScriptParseError(line_no,
                             round_tag + "expected 'awake=...; losses=...'");
    const auto awake_text = field(parts[0], "awake", line_no);
    const auto loss_text = field(parts[1], "losses", line_no);
    if (awake_text.empty())
      throw ScriptParseError(line_no, round_tag + "empty awake set");

    std::vector<ExpertIndex> members;
    for (auto tok : split(awake_text, ',')) {
      const auto idx = parse_int<std::size_t>(tok);
      if (!idx)
        throw ScriptParseError(line_no, round_tag + "bad expert index '" +
                                            std::string(tok) + "'");
      if (*idx >= *n)
        throw ScriptParseError(line_no, round_tag + "expert " +
                                            std::to_string(*idx) +
                                            " out of range");
      members.push_back(*idx);
    }
    std::vector<double> losses;
    if (!loss_text.empty())
      for (auto tok : split(loss_text, ',')) {
        const auto v = parse_double(tok);
        if (!v)
          throw ScriptParseError(line_no, round_tag + "bad loss value '" +
                                              std::string(tok) + "'");
        losses.push_back(*v);
      }
    if (losses.size() != members.size())
      throw ScriptParseError(line_no,
                             round_tag + "losses must align with awake experts");
    for (std::size_t k = 0; k < members.size(); ++k)
      if (!in_unit_interval(losses[k]))
        throw ScriptParseError(line_no, round_tag + "loss of expert " +
                                            std::to_string(members[k]) +
                                            " outside [0,1]");
    // Keep the file's pairing when the awake list is not sorted.
    std::vector<std::size_t> perm(members.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) {
      return members[a] < members[b];
    });
    std::vector<double> aligned(losses.size());
    for (std::size_t k = 0; k < perm.size(); ++k) aligned[k] = losses[perm[k]];
    try {
      h.rounds.push_back({AwakeSet(std::move(members), *n), std::move(aligned)});
    } catch (const std::invalid_argument& e) {
      throw ScriptParseError(line_no, round_tag + e.what());
    }
  }

  if (!n) throw ScriptParseError(0, "missing 'N=<int> T=<int>' header");
  if (h.rounds.size() != *horizon)
    throw ScriptParseError(0, "header declares T=" + std::to_string(*horizon) +
                                  " but file has " +
                                  std::to_string(h.rounds.size()) + " rounds");
  return {std::move(h)};
}

ScriptedEnv load_scripted(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scripted(buf.str());
}

std::string format_scripted(const LossHistory& history) {
  std::string out = "N=" + std::to_string(history.n_experts) +
                    " T=" + std::to_string(history.horizon()) + "\n";
  for (const Round& r : history.rounds) {
    out += "awake=";
    for (std::size_t k = 0; k < r.awake.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(r.awake[k]);
    }
    out += "; losses=";
    for (std::size_t k = 0; k < r.losses.size(); ++k) {
      if (k) out += ',';
      out += format_double(r.losses[k]);
    }
    out += '\n';
  }
  return out;
}

void save_scripted(const LossHistory& history,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_scripted(history);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace riplm
