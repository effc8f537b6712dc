#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wfbh/allocator.hpp"
#include "wfbh/backhaul.hpp"
#include "wfbh/channel.hpp"

namespace wfbh {

// Tree as written in a config file: node ids are 1-based (APs 1..K,
// destination N) and both arrays list nodes 1..N-1 in order.
struct TreeSpec {
  std::size_t num_aps = 0;
  std::size_t num_nodes = 0;
  std::vector<std::size_t> parent;
  std::vector<double> capacity_bps;  // +inf for an unconstrained link
  // Half-width of the uniform jitter applied per Monte Carlo trial.
  double capacity_jitter_bps = 0.0;

  BackhaulTree build() const;
  // Capacities redrawn as max(0, mean + U(-jitter, +jitter)).
  BackhaulTree build_jittered(Rng& rng) const;
};

// Channels given directly instead of generated from geometry.
struct ExplicitChannels {
  std::vector<double> effective_noise_w;
  std::vector<double> bandwidth_hz;

  std::vector<UplinkChannel> build() const;
};

struct AllocatorSpec {
  std::vector<double> tau_bps = {5e5};
  std::optional<double> z_factor;  // default_z per instance when absent
  int max_iterations = 500;
  double convergence_eps_w = 1e-6;
  int convergence_window = 5;

  AllocatorParams params_for(double tau_bps, std::span<const UplinkChannel> channels,
                             double p_max_w) const;
};

struct OracleSpec {
  double tol_bps = 1e3;
  int grid_steps = 1000;  // grid step = p_max / grid_steps
};

enum class ExperimentKind { kConverge, kSweep, kOracleCheck };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

struct ExperimentSpec {
  std::optional<ExperimentKind> kind;
  int trials = 1;
  std::vector<double> radius_grid_m;
  std::string output_path = "out";
  int jobs = 0;  // 0: one worker per hardware thread
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  std::optional<ExplicitChannels> channels;
  std::optional<TreeSpec> tree;
  AllocatorSpec allocator;
  OracleSpec oracle;
  ExperimentSpec experiment;
};

// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully resolved configuration (defaults included) as pretty JSON.
std::string to_json_string(const ExperimentConfig& config);

}  // namespace wfbh
