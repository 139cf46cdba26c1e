#include "riplm/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "riplm/format.hpp"

namespace riplm::harness {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  // An empty path is the document root.
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError(child(key), "missing required key");
    return j_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      check_kind<T>(v, key);
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(child(key), "wrong value type");
    }
  }

  template <typename T>
  std::optional<T> get_opt(const std::string& key) {
    if (!j_.contains(key)) return std::nullopt;
    return get<T>(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(child(it.key()), "unknown key");
  }

 private:
  template <typename T>
  void check_kind(const json& v, const std::string& key) const {
    bool ok = true;
    if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
    else if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
    else if constexpr (std::is_floating_point_v<T>) ok = v.is_number();
    else if constexpr (std::is_integral_v<T>) ok = v.is_number_unsigned() ||
                                               (v.is_number_integer() && v.get<long long>() >= 0);
    else if constexpr (std::is_same_v<T, std::vector<double>>) ok = v.is_array();
    else if constexpr (std::is_same_v<T, std::vector<std::string>>) ok = v.is_array();
    else if constexpr (std::is_same_v<T, std::vector<std::uint64_t>>) ok = v.is_array();
    if (!ok) throw ConfigError(child(key), "wrong value type");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

EnvironmentSpec parse_environment(const json& j,
                                  const std::filesystem::path& base_dir) {
  Section s(j, "environment");
  const auto type = s.get<std::string>("type");
  EnvironmentSpec out;
  if (type == "stochastic") {
    StochasticEnvSpec spec;
    spec.means = s.get<std::vector<double>>("means");
    spec.horizon = s.get<std::size_t>("horizon");
    if (s.has("availability")) {
      Section a(s.raw("availability"), s.child("availability"));
      const auto kind = a.get<std::string>("type");
      if (kind == "always") {
        spec.availability = AlwaysAwake{};
      } else if (kind == "iid") {
        const json& q = a.raw("q");
        IidAwake iid;
        if (q.is_number())
          iid.q.assign(spec.means.size(), q.get<double>());
        else if (q.is_array())
          iid.q = a.get<std::vector<double>>("q");
        else
          throw ConfigError(a.child("q"), "expected a number or an array");
        spec.availability = std::move(iid);
      } else {
        throw ConfigError(a.child("type"), "unknown availability '" + kind + "'");
      }
      a.finish();
    }
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("environment", e.what());
    }
    out = std::move(spec);
  } else if (type == "lower_bound") {
    LowerBoundEnvSpec spec;
    spec.n_experts = s.get<std::size_t>("n_experts");
    spec.eps_gap = s.get_opt<double>("eps_gap").value_or(0.125);
    const auto horizon = s.get_opt<std::size_t>("horizon");
    const auto mult = s.get_opt<double>("horizon_multiplier");
    if (horizon && mult)
      throw ConfigError("environment",
                        "give either horizon or horizon_multiplier, not both");
    try {
      spec.horizon = horizon ? *horizon
                             : lower_bound_horizon(spec.eps_gap, mult.value_or(1.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("environment", e.what());
    }
    if (auto i = s.get_opt<std::size_t>("i_star")) spec.i_star = *i;
    try {
      spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("environment", e.what());
    }
    out = spec;
  } else if (type == "scripted") {
    std::filesystem::path p = s.get<std::string>("path");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    out = ScriptedEnvSpec{p};
  } else {
    throw ConfigError(s.child("type"), "unknown environment type '" + type + "'");
  }
  s.finish();
  return out;
}

AlgorithmSpec parse_algorithm(const json& j) {
  Section s(j, "algorithm");
  const auto type = s.get<std::string>("type");
  AlgorithmSpec out;
  if (type == "riplm") {
    RiplmAlgorithm a;
    a.hp.eta = s.get_opt<double>("eta").value_or(a.hp.eta);
    a.hp.delta = s.get_opt<double>("delta").value_or(a.hp.delta);
    a.hp.tau_init = s.get_opt<double>("tau_init").value_or(a.hp.tau_init);
    a.hp.tau_min = s.get_opt<double>("tau_min").value_or(a.hp.tau_min);
    a.hp.cooling_c = s.get_opt<double>("cooling_c").value_or(a.hp.cooling_c);
    a.hp.cooling_enabled = s.get_opt<bool>("cooling").value_or(false);
    a.doubling = s.get_opt<bool>("doubling").value_or(false);
    a.prior = s.get_opt<std::vector<double>>("prior");
    try {
      a.hp.validate();
      if (a.prior) (void)Prior(*a.prior);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("algorithm", e.what());
    }
    out = std::move(a);
  } else if (type == "hedge") {
    HedgeAlgorithm a;
    a.learning_rate = s.get_opt<double>("learning_rate");
    if (a.learning_rate && !(*a.learning_rate > 0.0))
      throw ConfigError(s.child("learning_rate"), "must be positive");
    out = a;
  } else if (type == "uniform") {
    out = UniformAlgorithm{};
  } else {
    throw ConfigError(s.child("type"), "unknown algorithm type '" + type + "'");
  }
  s.finish();
  return out;
}

}  // namespace

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names = {
      "variance_domination", "consistency", "telescoping", "second_bound",
      "gradcheck",           "pl_rank_gap", "theorem1",    "variance_budget"};
  return names;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  const auto& known = diagnostic_names();
  for (std::size_t k = 0; k < diagnostics.size(); ++k)
    if (std::find(known.begin(), known.end(), diagnostics[k]) == known.end())
      throw ConfigError("diagnostics[" + std::to_string(k) + "]",
                        "unknown diagnostic '" + diagnostics[k] + "'");
  if (!(bound_constant > 0.0))
    throw ConfigError("bound_constant", "must be positive");
  if (const auto* a = std::get_if<RiplmAlgorithm>(&algorithm)) {
    if (a->prior) {
      std::size_t n = 0;
      if (const auto* e = std::get_if<StochasticEnvSpec>(&environment))
        n = e->means.size();
      else if (const auto* e = std::get_if<LowerBoundEnvSpec>(&environment))
        n = e->n_experts;
      if (n && a->prior->size() != n)
        throw ConfigError("algorithm.prior", "length does not match N");
    }
  }
}

ExperimentConfig parse_config(const json& doc,
                              const std::filesystem::path& base_dir) {
  Section s(doc, "");
  ExperimentConfig cfg;
  cfg.environment = parse_environment(s.raw("environment"), base_dir);
  if (s.has("algorithm")) cfg.algorithm = parse_algorithm(s.raw("algorithm"));
  cfg.seeds = s.get<std::vector<std::uint64_t>>("seeds");
  cfg.diagnostics = s.get_opt<std::vector<std::string>>("diagnostics")
                        .value_or(diagnostic_names());
  cfg.bound_constant = s.get_opt<double>("bound_constant").value_or(10.0);
  cfg.gradcheck_instances =
      s.get_opt<std::size_t>("gradcheck_instances").value_or(1000);
  if (auto out = s.get_opt<std::string>("output")) cfg.output = *out;
  s.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), e.what());
  }
  return parse_config(doc, path.parent_path());
}

json to_json(const ExperimentConfig& cfg) {
  json env;
  std::visit(
      [&](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, StochasticEnvSpec>) {
          env = {{"type", "stochastic"}, {"means", e.means}, {"horizon", e.horizon}};
          if (const auto* iid = std::get_if<IidAwake>(&e.availability))
            env["availability"] = {{"type", "iid"}, {"q", iid->q}};
          else
            env["availability"] = {{"type", "always"}};
        } else if constexpr (std::is_same_v<E, LowerBoundEnvSpec>) {
          env = {{"type", "lower_bound"},
                 {"n_experts", e.n_experts},
                 {"eps_gap", e.eps_gap},
                 {"horizon", e.horizon}};
          if (e.i_star) env["i_star"] = *e.i_star;
        } else {
          env = {{"type", "scripted"}, {"path", e.path.string()}};
        }
      },
      cfg.environment);

  json algo;
  std::visit(
      [&](const auto& a) {
        using A = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<A, RiplmAlgorithm>) {
          algo = {{"type", "riplm"},
                  {"eta", a.hp.eta},
                  {"delta", a.hp.delta},
                  {"tau_init", a.hp.tau_init},
                  {"tau_min", a.hp.tau_min},
                  {"cooling_c", a.hp.cooling_c},
                  {"cooling", a.hp.cooling_enabled},
                  {"doubling", a.doubling}};
          if (a.prior) algo["prior"] = *a.prior;
        } else if constexpr (std::is_same_v<A, HedgeAlgorithm>) {
          algo = {{"type", "hedge"}};
          if (a.learning_rate) algo["learning_rate"] = *a.learning_rate;
        } else {
          algo = {{"type", "uniform"}};
        }
      },
      cfg.algorithm);

  return {{"environment", env},
          {"algorithm", algo},
          {"seeds", cfg.seeds},
          {"diagnostics", cfg.diagnostics},
          {"bound_constant", cfg.bound_constant},
          {"gradcheck_instances", cfg.gradcheck_instances},
          {"output", cfg.output.string()}};
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view tok = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    if (dash != std::string_view::npos) {
      const auto lo = parse_int<std::uint64_t>(trim(tok.substr(0, dash)));
      const auto hi = parse_int<std::uint64_t>(trim(tok.substr(dash + 1)));
      if (!lo || !hi || *lo > *hi)
        throw ConfigError("seeds", "bad seed range '" + std::string(tok) + "'");
      for (auto v = *lo; v <= *hi; ++v) seeds.push_back(v);
    } else {
      const auto v = parse_int<std::uint64_t>(tok);
      if (!v) throw ConfigError("seeds", "bad seed '" + std::string(tok) + "'");
      seeds.push_back(*v);
    }
  }
  if (seeds.empty()) throw ConfigError("seeds", "at least one seed is required");
  return seeds;
}

}  // namespace riplm::harness
