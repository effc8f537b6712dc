#include "wfbh/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wfbh/errors.hpp"

namespace wfbh {

std::vector<WaterfillCandidate> as_candidates(std::span<const UplinkChannel> channels) {
  std::vector<WaterfillCandidate> out;
  out.reserve(channels.size());
  for (const auto& c : channels) out.push_back({c.effective_noise_w(), c.bandwidth_hz()});
  return out;
}

double waterfill_level(double residual_w, std::span<const WaterfillCandidate> candidates) {
  if (candidates.empty()) throw InvalidParameter("waterfilling needs at least one candidate channel");
  if (!(residual_w >= 0.0) || !std::isfinite(residual_w)) {
    throw InvalidParameter("residual power must be finite and non-negative");
  }
  for (const auto& c : candidates) {
    if (!(c.effective_noise_w >= 0.0) || !std::isfinite(c.effective_noise_w)) {
      throw InvalidParameter("candidate effective noise must be finite and non-negative");
    }
    if (!(c.bandwidth_hz > 0.0)) throw InvalidParameter("candidate bandwidth must be positive");
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto floor_of = [&](std::size_t i) { return candidates[i].effective_noise_w / candidates[i].bandwidth_hz; };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return floor_of(a) < floor_of(b); });

  double noise_sum = 0.0;
  double bandwidth_sum = 0.0;
  for (const std::size_t i : order) {
    noise_sum += candidates[i].effective_noise_w;
    bandwidth_sum += candidates[i].bandwidth_hz;
  }
  for (std::size_t active = order.size();; --active) {
    const double level = (residual_w + noise_sum) / bandwidth_sum;
    const std::size_t worst = order[active - 1];
    if (active == 1 || level >= floor_of(worst)) return level;
    noise_sum -= candidates[worst].effective_noise_w;
    bandwidth_sum -= candidates[worst].bandwidth_hz;
  }
}

std::vector<double> waterfill_alloc(double level, std::span<const UplinkChannel> channels) {
  if (!(level >= 0.0)) throw InvalidParameter("water level must be non-negative");
  std::vector<double> powers(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    powers[k] = std::max(channels[k].bandwidth_hz() * level - channels[k].effective_noise_w(), 0.0);
  }
  return powers;
}

double residual_power(int t, std::span<const double> prev_powers_w,
                      std::span<const NodeState> effective_states, double z_factor, double p_max_w) {
  if (t < 0) throw InvalidParameter("t must be non-negative");
  if (t == 0) return p_max_w;
  if (prev_powers_w.size() != effective_states.size()) {
    throw InvalidParameter("power and state vectors differ in length");
  }
  double residual = p_max_w;
  for (std::size_t k = 0; k < prev_powers_w.size(); ++k) {
    switch (effective_states[k]) {
      case NodeState::kUnderUtilized: break;
      case NodeState::kBalanced: residual -= prev_powers_w[k]; break;
      case NodeState::kOverLoaded: residual -= z_factor * prev_powers_w[k]; break;
    }
  }
  return std::max(residual, 0.0);
}

std::vector<double> update_power(std::span<const double> prev_powers_w,
                                 std::span<const NodeState> effective_states, double level,
                                 double z_factor, std::span<const UplinkChannel> channels) {
  if (prev_powers_w.size() != channels.size() || effective_states.size() != channels.size()) {
    throw InvalidParameter("power, state and channel vectors differ in length");
  }
  std::vector<double> next(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    switch (effective_states[k]) {
      case NodeState::kUnderUtilized:
        next[k] = std::max(channels[k].bandwidth_hz() * level - channels[k].effective_noise_w(), 0.0);
        break;
      case NodeState::kBalanced: next[k] = prev_powers_w[k]; break;
      case NodeState::kOverLoaded: next[k] = z_factor * prev_powers_w[k]; break;
    }
  }
  return next;
}

double z_lower_bound(double tau_bps, std::span<const double> bandwidths_hz) {
  if (!(tau_bps > 0.0)) throw InvalidParameter("tau must be positive");
  if (bandwidths_hz.empty()) throw InvalidParameter("at least one bandwidth required");
  const double max_w = *std::max_element(bandwidths_hz.begin(), bandwidths_hz.end());
  if (!(max_w > 0.0)) throw InvalidParameter("bandwidths must be positive");
  return std::exp2(-tau_bps / max_w);
}

double default_z(double tau_bps, std::span<const double> bandwidths_hz) {
  const double z_min = z_lower_bound(tau_bps, bandwidths_hz);
  const double z = 1.01 * z_min;
  return z < 1.0 ? z : 0.5 * (z_min + 1.0);
}

void AllocatorParams::validate() const {
  if (!(tau_bps > 0.0)) throw InvalidParameter("tau_bps must be positive");
  if (!(z_factor > 0.0 && z_factor < 1.0)) throw InvalidParameter("z_factor must lie in (0, 1)");
  if (!(p_max_w > 0.0)) throw InvalidParameter("p_max_w must be positive");
  if (max_iterations < 0) throw InvalidParameter("max_iterations must be non-negative");
  if (!(convergence_eps_w > 0.0)) throw InvalidParameter("convergence_eps_w must be positive");
  if (convergence_window < 1) throw InvalidParameter("convergence_window must be at least 1");
}

AllocatorParams AllocatorParams::with_default_z(double tau_bps, std::span<const UplinkChannel> channels,
                                                double p_max_w) {
  AllocatorParams params;
  params.tau_bps = tau_bps;
  params.p_max_w = p_max_w;
  params.z_factor = default_z(tau_bps, bandwidths(channels));
  return params;
}

double PowerAllocation::total_w() const {
  return std::accumulate(powers_w.begin(), powers_w.end(), 0.0);
}

namespace {

IterationRecord make_record(int step, int t, bool reset, std::vector<double> powers,
                            std::optional<double> level, double residual,
                            std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                            double tau_bps) {
  IterationRecord rec;
  rec.step = step;
  rec.t = t;
  rec.reset = reset;
  rec.level = level;
  rec.residual_w = residual;
  rec.uplink_rates_bps = uplink_rates(channels, powers);
  rec.allocation.powers_w = std::move(powers);
  NodeStateReport report = assess_backhaul(tree, rec.uplink_rates_bps, tau_bps);
  rec.node_rates_bps = std::move(report.rates_bps);
  rec.destination_rate_bps = report.destination_rate_bps;
  rec.differentials_bps = std::move(report.differentials_bps);
  rec.states = std::move(report.states);
  rec.effective_states = std::move(report.effective_states);
  return rec;
}

// Classic waterfilling over every uplink with the full budget.
IterationRecord bootstrap(int step, bool reset, std::span<const UplinkChannel> channels,
                          const BackhaulTree& tree, const AllocatorParams& params) {
  const double residual = residual_power(0, {}, {}, params.z_factor, params.p_max_w);
  const auto candidates = as_candidates(channels);
  const double level = waterfill_level(residual, candidates);
  return make_record(step, 0, reset, waterfill_alloc(level, channels), level, residual, channels, tree,
                     params.tau_bps);
}

}  // namespace

AdaptationTrace run_adaptation(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                               const AllocatorParams& params, const ChannelUpdate& on_step) {
  params.validate();
  if (channels.size() != tree.num_aps()) {
    throw InvalidParameter("channel count " + std::to_string(channels.size()) +
                           " does not match AP count " + std::to_string(tree.num_aps()));
  }
  std::vector<UplinkChannel> current(channels.begin(), channels.end());

  AdaptationTrace trace;
  trace.z_within_stability_bound = params.z_factor > z_lower_bound(params.tau_bps, bandwidths(current));
  trace.records.push_back(bootstrap(0, false, current, tree, params));

  int stable = 0;
  for (int step = 1; step <= params.max_iterations; ++step) {
    if (on_step) {
      const std::vector<UplinkChannel> before = current;
      on_step(step - 1, current);
      if (current.size() != before.size()) throw InvalidParameter("channel update changed the AP count");
      const bool faded = !std::equal(before.begin(), before.end(), current.begin(),
                                     [](const UplinkChannel& a, const UplinkChannel& b) {
                                       return a.effective_noise_w() == b.effective_noise_w();
                                     });
      if (faded) {
        trace.records.push_back(bootstrap(step, true, current, tree, params));
        stable = 0;
        continue;
      }
    }

    const IterationRecord& prev = trace.records.back();
    const int t = prev.t + 1;
    const double residual = residual_power(t, prev.allocation.powers_w, prev.effective_states,
                                           params.z_factor, params.p_max_w);

    std::vector<WaterfillCandidate> eligible;
    for (std::size_t k = 0; k < current.size(); ++k) {
      if (prev.effective_states[k] == NodeState::kUnderUtilized) {
        eligible.push_back({current[k].effective_noise_w(), current[k].bandwidth_hz()});
      }
    }
    // With no under-utilized uplink the residual stays idle this round.
    std::optional<double> level;
    if (!eligible.empty()) level = waterfill_level(residual, eligible);

    std::vector<double> next = update_power(prev.allocation.powers_w, prev.effective_states,
                                            level.value_or(0.0), params.z_factor, current);
    double change = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      change = std::max(change, std::abs(next[k] - prev.allocation.powers_w[k]));
    }
    trace.records.push_back(
        make_record(step, t, false, std::move(next), level, residual, current, tree, params.tau_bps));

    stable = change < params.convergence_eps_w ? stable + 1 : 0;
    if (stable >= params.convergence_window) {
      trace.termination = Termination::kConverged;
      break;
    }
  }
  return trace;
}

}  // namespace wfbh
