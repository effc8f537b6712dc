#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wfbh/backhaul.hpp"
#include "wfbh/channel.hpp"

namespace wfbh {

// A channel offered to the waterfilling level search. Noise may be zero.
struct WaterfillCandidate {
  double effective_noise_w;
  double bandwidth_hz;
};

std::vector<WaterfillCandidate> as_candidates(std::span<const UplinkChannel> channels);

// Water level mu (W/Hz) such that sum_k (W_k mu - E_k)^+ equals `residual_w`.
// Candidates are ranked by E/W (ties by position) and the worst is dropped
// until the level clears every remaining noise floor.
double waterfill_level(double residual_w, std::span<const WaterfillCandidate> candidates);

// (W_k mu - E_k)^+ per channel.
std::vector<double> waterfill_alloc(double level, std::span<const UplinkChannel> channels);

// Power still free for waterfilling after balanced uplinks keep their power
// and over-loaded uplinks back off by `z_factor`. Returns `p_max_w` at t = 0.
double residual_power(int t, std::span<const double> prev_powers_w,
                      std::span<const NodeState> effective_states, double z_factor, double p_max_w);

// Three-branch update: waterfill, hold, or scale by `z_factor`.
std::vector<double> update_power(std::span<const double> prev_powers_w,
                                 std::span<const NodeState> effective_states, double level,
                                 double z_factor, std::span<const UplinkChannel> channels);

// 2^(-tau / max W): backoff factors above this keep a single step's rate
// drop under tau.
double z_lower_bound(double tau_bps, std::span<const double> bandwidths_hz);

// 1.01 * z_lower_bound, pulled back to the midpoint of (Z_min, 1) when that
// product would reach 1.
double default_z(double tau_bps, std::span<const double> bandwidths_hz);

struct AllocatorParams {
  double tau_bps = 5e5;
  double z_factor = 0.95;
  double p_max_w = 1.0;
  int max_iterations = 500;
  double convergence_eps_w = 1e-6;
  int convergence_window = 5;

  void validate() const;

  // Defaults with Z taken from default_z for these channels.
  static AllocatorParams with_default_z(double tau_bps, std::span<const UplinkChannel> channels,
                                        double p_max_w = 1.0);
};

struct PowerAllocation {
  std::vector<double> powers_w;

  double total_w() const;
};

enum class Termination { kConverged, kMaxIterations };

struct IterationRecord {
  int step = 0;  // global iteration index
  int t = 0;     // adaptation time; returns to 0 after a channel reset
  bool reset = false;
  PowerAllocation allocation;
  std::vector<double> uplink_rates_bps;
  std::vector<double> node_rates_bps;
  double destination_rate_bps = 0.0;
  std::vector<double> differentials_bps;
  std::vector<NodeState> states;
  std::vector<NodeState> effective_states;
  // Empty when no uplink was eligible for waterfilling this iteration.
  std::optional<double> level;
  double residual_w = 0.0;
};

struct AdaptationTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::kMaxIterations;
  // False when Z <= 2^(-tau/max W); the run proceeds regardless.
  bool z_within_stability_bound = true;

  // Updates performed after the t = 0 bootstrap.
  std::size_t iterations() const { return records.empty() ? 0 : records.size() - 1; }
  const IterationRecord& final_record() const { return records.back(); }
  bool converged() const { return termination == Termination::kConverged; }
};

// Invoked after every iteration with the step just recorded; it may modify
// the channels in place (fading). Any change of an effective noise value
// restarts the adaptation from classic waterfilling.
using ChannelUpdate = std::function<void(int step, std::vector<UplinkChannel>& channels)>;

AdaptationTrace run_adaptation(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                               const AllocatorParams& params, const ChannelUpdate& on_step = {});

}  // namespace wfbh
