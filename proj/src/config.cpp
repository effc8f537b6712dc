#include "wfbh/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wfbh/errors.hpp"

namespace wfbh {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index_key(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const json& value, const std::string& key) {
  if (!value.is_number()) throw ConfigError(key, "expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ConfigError(key, "must be finite");
  return x;
}

// Numbers, or null / "inf" for an unconstrained capacity.
double as_capacity(const json& value, const std::string& key) {
  if (value.is_null() || (value.is_string() && value.get<std::string>() == "inf")) return kInf;
  const double x = as_number(value, key);
  if (x < 0.0) throw ConfigError(key, "capacity must be non-negative");
  return x;
}

// Walks one JSON object, remembering which keys were consumed so that
// typos surface as errors instead of silently falling back to defaults.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return object_.at(key);
  }

  std::string key(const std::string& k) const { return join(path_, k); }

  double number(const std::string& k, double fallback) {
    return has(k) ? as_number(raw(k), key(k)) : fallback;
  }

  double positive(const std::string& k, double fallback) {
    const double x = number(k, fallback);
    if (!(x > 0.0)) throw ConfigError(key(k), "must be positive");
    return x;
  }

  int integer(const std::string& k, int fallback, int minimum) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_number_integer()) throw ConfigError(key(k), "expected an integer");
    const auto x = v.get<long long>();
    if (x < minimum || x > std::numeric_limits<int>::max()) {
      throw ConfigError(key(k), "must be an integer >= " + std::to_string(minimum));
    }
    return static_cast<int>(x);
  }

  std::uint64_t seed(const std::string& k, std::uint64_t fallback) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw ConfigError(key(k), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& k, const std::string& fallback) {
    if (!has(k)) return fallback;
    const json& v = raw(k);
    if (!v.is_string()) throw ConfigError(key(k), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& k, bool allow_empty = false) {
    const json& v = raw(k);
    if (!v.is_array()) throw ConfigError(key(k), "expected an array of numbers");
    if (v.empty() && !allow_empty) throw ConfigError(key(k), "must not be empty");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index_key(key(k), i)));
    return out;
  }

  std::vector<double> positives(const std::string& k) {
    std::vector<double> out = numbers(k);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!(out[i] > 0.0)) throw ConfigError(index_key(key(k), i), "must be positive");
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, unused] : object_.items()) {
      if (!used_.contains(k) && !k.starts_with("_")) throw ConfigError(key(k), "unknown key");
    }
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> used_;
};

ScenarioConfig parse_scenario(ObjectReader& r) {
  ScenarioConfig s;
  s.num_aps = r.integer("num_aps", s.num_aps, 1);
  s.cluster_radius_m = r.positive("cluster_radius_m", s.cluster_radius_m);
  s.path_loss_exponent = r.positive("path_loss_exponent", s.path_loss_exponent);
  s.shadowing_stddev_db = r.number("shadowing_stddev_db", s.shadowing_stddev_db);
  if (s.shadowing_stddev_db < 0.0) throw ConfigError(r.key("shadowing_stddev_db"), "must be >= 0");
  s.noise_psd_dbw_per_hz = r.number("noise_psd_dbw_per_hz", s.noise_psd_dbw_per_hz);
  if (r.has("bandwidth_choices_hz")) s.bandwidth_choices_hz = r.positives("bandwidth_choices_hz");
  s.p_max_w = r.positive("p_max_w", s.p_max_w);
  s.rng_seed = r.seed("rng_seed", s.rng_seed);
  s.min_distance_m = r.positive("min_distance_m", s.min_distance_m);
  return s;
}

std::optional<ExplicitChannels> parse_channels(ObjectReader& r, std::size_t num_aps) {
  const bool has_noise = r.has("effective_noise_w");
  const bool has_bw = r.has("bandwidth_hz");
  if (!has_noise && !has_bw) return std::nullopt;
  if (has_noise != has_bw) {
    throw ConfigError(r.key(has_noise ? "bandwidth_hz" : "effective_noise_w"),
                      "explicit channels need both effective_noise_w and bandwidth_hz");
  }
  ExplicitChannels c;
  c.effective_noise_w = r.positives("effective_noise_w");
  c.bandwidth_hz = r.positives("bandwidth_hz");
  if (c.effective_noise_w.size() != c.bandwidth_hz.size()) {
    throw ConfigError(r.key("bandwidth_hz"), "length differs from effective_noise_w");
  }
  if (c.bandwidth_hz.size() != num_aps) {
    throw ConfigError(r.key("effective_noise_w"), "length must equal scenario.num_aps (" +
                                                      std::to_string(num_aps) + ")");
  }
  return c;
}

TreeSpec parse_tree(ObjectReader& r, std::size_t scenario_aps) {
  TreeSpec t;
  t.num_aps = static_cast<std::size_t>(r.integer("num_aps", static_cast<int>(scenario_aps), 1));
  if (t.num_aps != scenario_aps) {
    throw ConfigError(r.key("num_aps"), "must equal scenario.num_aps (" + std::to_string(scenario_aps) + ")");
  }
  if (!r.has("num_nodes")) throw ConfigError(r.key("num_nodes"), "required");
  t.num_nodes = static_cast<std::size_t>(r.integer("num_nodes", 0, static_cast<int>(t.num_aps) + 1));
  const std::size_t links = t.num_nodes - 1;

  if (!r.has("parent")) throw ConfigError(r.key("parent"), "required");
  const json& parent = r.raw("parent");
  if (!parent.is_array() || parent.size() != links) {
    throw ConfigError(r.key("parent"), "expected an array of " + std::to_string(links) +
                                           " parent ids (nodes 1.." + std::to_string(links) + ")");
  }
  for (std::size_t i = 0; i < links; ++i) {
    const std::string k = index_key(r.key("parent"), i);
    if (!parent[i].is_number_integer()) throw ConfigError(k, "expected a node id");
    const auto id = parent[i].get<long long>();
    if (id < 1 || static_cast<std::size_t>(id) > t.num_nodes) {
      throw ConfigError(k, "node id must lie in 1.." + std::to_string(t.num_nodes));
    }
    t.parent.push_back(static_cast<std::size_t>(id));
  }

  if (!r.has("capacity_bps")) throw ConfigError(r.key("capacity_bps"), "required");
  const json& capacity = r.raw("capacity_bps");
  if (!capacity.is_array() || capacity.size() != links) {
    throw ConfigError(r.key("capacity_bps"), "expected an array of " + std::to_string(links) + " capacities");
  }
  for (std::size_t i = 0; i < links; ++i) {
    t.capacity_bps.push_back(as_capacity(capacity[i], index_key(r.key("capacity_bps"), i)));
  }
  t.capacity_jitter_bps = r.number("capacity_jitter_bps", 0.0);
  if (t.capacity_jitter_bps < 0.0) throw ConfigError(r.key("capacity_jitter_bps"), "must be >= 0");

  try {
    (void)t.build();
  } catch (const TreeError& e) {
    throw ConfigError(r.key("parent"), e.what());
  }
  return t;
}

AllocatorSpec parse_allocator(ObjectReader& r) {
  AllocatorSpec a;
  if (r.has("tau_bps")) {
    const json& tau = r.raw("tau_bps");
    if (tau.is_array()) {
      a.tau_bps = r.positives("tau_bps");
    } else {
      a.tau_bps = {as_number(tau, r.key("tau_bps"))};
      if (!(a.tau_bps[0] > 0.0)) throw ConfigError(r.key("tau_bps"), "must be positive");
    }
  }
  if (r.has("z_factor") && !r.raw("z_factor").is_null()) {
    const double z = as_number(r.raw("z_factor"), r.key("z_factor"));
    if (!(z > 0.0 && z < 1.0)) throw ConfigError(r.key("z_factor"), "must lie in (0, 1)");
    a.z_factor = z;
  }
  a.max_iterations = r.integer("max_iterations", a.max_iterations, 0);
  a.convergence_eps_w = r.positive("convergence_eps_w", a.convergence_eps_w);
  a.convergence_window = r.integer("convergence_window", a.convergence_window, 1);
  return a;
}

json capacity_json(double c) { return std::isinf(c) ? json("inf") : json(c); }

}  // namespace

BackhaulTree TreeSpec::build() const {
  std::map<NodeId, NodeId> parents;
  std::map<NodeId, double> capacities;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    parents[i] = parent[i] - 1;
    capacities[i] = capacity_bps.at(i);
  }
  return BackhaulTree::validate(parents, capacities, num_aps, num_nodes);
}

BackhaulTree TreeSpec::build_jittered(Rng& rng) const {
  const BackhaulTree base = build();
  if (capacity_jitter_bps <= 0.0) return base;
  std::uniform_real_distribution<double> jitter(-capacity_jitter_bps, capacity_jitter_bps);
  std::vector<double> drawn(capacity_bps.size());
  for (std::size_t i = 0; i < drawn.size(); ++i) {
    const double offset = jitter(rng);
    drawn[i] = std::isinf(capacity_bps[i]) ? capacity_bps[i] : std::max(0.0, capacity_bps[i] + offset);
  }
  return base.with_capacities(drawn);
}

std::vector<UplinkChannel> ExplicitChannels::build() const {
  std::vector<UplinkChannel> out;
  for (std::size_t k = 0; k < bandwidth_hz.size(); ++k) {
    out.push_back(UplinkChannel::from_effective_noise(bandwidth_hz[k], effective_noise_w[k]));
  }
  return out;
}

AllocatorParams AllocatorSpec::params_for(double tau_bps, std::span<const UplinkChannel> channels,
                                          double p_max_w) const {
  AllocatorParams p;
  p.tau_bps = tau_bps;
  p.p_max_w = p_max_w;
  p.z_factor = z_factor ? *z_factor : default_z(tau_bps, bandwidths(channels));
  p.max_iterations = max_iterations;
  p.convergence_eps_w = convergence_eps_w;
  p.convergence_window = convergence_window;
  return p;
}

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConverge: return "converge";
    case ExperimentKind::kSweep: return "sweep";
    case ExperimentKind::kOracleCheck: return "oracle-check";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  if (name == "converge") return ExperimentKind::kConverge;
  if (name == "sweep") return ExperimentKind::kSweep;
  if (name == "oracle-check") return ExperimentKind::kOracleCheck;
  return std::nullopt;
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ObjectReader top(root, "");
  ExperimentConfig config;

  if (top.has("scenario")) {
    ObjectReader r(top.raw("scenario"), "scenario");
    config.scenario = parse_scenario(r);
    config.channels = parse_channels(r, static_cast<std::size_t>(config.scenario.num_aps));
    r.finish();
  }
  if (top.has("tree")) {
    ObjectReader r(top.raw("tree"), "tree");
    config.tree = parse_tree(r, static_cast<std::size_t>(config.scenario.num_aps));
    r.finish();
  }
  if (top.has("allocator")) {
    ObjectReader r(top.raw("allocator"), "allocator");
    config.allocator = parse_allocator(r);
    r.finish();
  }
  if (top.has("oracle")) {
    ObjectReader r(top.raw("oracle"), "oracle");
    config.oracle.tol_bps = r.positive("tol_bps", config.oracle.tol_bps);
    config.oracle.grid_steps = r.integer("grid_steps", config.oracle.grid_steps, 1);
    r.finish();
  }
  if (top.has("experiment")) {
    ObjectReader r(top.raw("experiment"), "experiment");
    if (r.has("kind") && !r.raw("kind").is_null()) {
      const std::string name = r.string("kind", "");
      config.experiment.kind = parse_experiment_kind(name);
      if (!config.experiment.kind) {
        throw ConfigError(r.key("kind"), "expected one of converge, sweep, oracle-check; got '" + name + "'");
      }
    }
    config.experiment.trials = r.integer("trials", config.experiment.trials, 1);
    // An empty grid is legal here; run_sweep rejects it when it matters.
    if (r.has("radius_grid_m") && !(r.raw("radius_grid_m").is_array() && r.raw("radius_grid_m").empty())) {
      config.experiment.radius_grid_m = r.positives("radius_grid_m");
    }
    config.experiment.output_path = r.string("output_path", config.experiment.output_path);
    config.experiment.jobs = r.integer("jobs", config.experiment.jobs, 0);
    r.finish();
  }
  top.finish();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_json_string(const ExperimentConfig& config) {
  json j;
  const auto& s = config.scenario;
  j["scenario"] = {{"num_aps", s.num_aps},
                   {"cluster_radius_m", s.cluster_radius_m},
                   {"path_loss_exponent", s.path_loss_exponent},
                   {"shadowing_stddev_db", s.shadowing_stddev_db},
                   {"noise_psd_dbw_per_hz", s.noise_psd_dbw_per_hz},
                   {"bandwidth_choices_hz", s.bandwidth_choices_hz},
                   {"p_max_w", s.p_max_w},
                   {"rng_seed", s.rng_seed},
                   {"min_distance_m", s.min_distance_m}};
  if (config.channels) {
    j["scenario"]["effective_noise_w"] = config.channels->effective_noise_w;
    j["scenario"]["bandwidth_hz"] = config.channels->bandwidth_hz;
  }
  if (config.tree) {
    const auto& t = *config.tree;
    json caps = json::array();
    for (double c : t.capacity_bps) caps.push_back(capacity_json(c));
    j["tree"] = {{"num_aps", t.num_aps},          {"num_nodes", t.num_nodes},
                 {"parent", t.parent},            {"capacity_bps", caps},
                 {"capacity_jitter_bps", t.capacity_jitter_bps}};
  }
  const auto& a = config.allocator;
  j["allocator"] = {{"tau_bps", a.tau_bps},
                    {"z_factor", a.z_factor ? json(*a.z_factor) : json(nullptr)},
                    {"max_iterations", a.max_iterations},
                    {"convergence_eps_w", a.convergence_eps_w},
                    {"convergence_window", a.convergence_window}};
  j["oracle"] = {{"tol_bps", config.oracle.tol_bps}, {"grid_steps", config.oracle.grid_steps}};
  const auto& e = config.experiment;
  j["experiment"] = {{"kind", e.kind ? json(to_string(*e.kind)) : json(nullptr)},
                     {"trials", e.trials},
                     {"radius_grid_m", e.radius_grid_m},
                     {"output_path", e.output_path},
                     {"jobs", e.jobs}};
  return j.dump(2);
}

}  // namespace wfbh
