#include "wfbh/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wfbh/allocator.hpp"
#include "wfbh/errors.hpp"

namespace wfbh {

const char* to_string(OracleMethod method) {
  switch (method) {
    case OracleMethod::kNestedWaterfilling: return "nested-waterfilling";
    case OracleMethod::kGrid: return "grid";
  }
  return "unknown";
}

double evaluate_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                     std::span<const double> powers_w) {
  return achievable_rates(tree, uplink_rates(channels, powers_w)).destination_rate_bps;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_instance(std::span<const UplinkChannel> channels, const BackhaulTree& tree, double p_max_w) {
  if (channels.size() != tree.num_aps()) throw InvalidParameter("channel count does not match AP count");
  if (!(p_max_w > 0.0) || !std::isfinite(p_max_w)) throw InvalidParameter("p_max_w must be positive");
}

double rate_at_level(const UplinkChannel& c, double level) {
  if (level <= c.noise_level()) return 0.0;
  if (std::isinf(level)) return kInf;
  return c.bandwidth_hz() * std::log2(level / c.noise_level());
}

double power_at_level(const UplinkChannel& c, double level) {
  return std::max(c.bandwidth_hz() * level - c.effective_noise_w(), 0.0);
}

// Largest x in [lo, inf) with f(x) <= target, for f non-decreasing and
// continuous with f(lo) <= target. Returns +inf when f stays below target.
template <typename F>
double sup_below(F&& f, double lo, double target) {
  if (f(kInf) <= target) return kInf;
  double hi = std::max(lo, std::numeric_limits<double>::min()) * 2.0;
  while (f(hi) <= target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 2000 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) <= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Water-level ceiling for each AP implied by every capacity on its path.
std::vector<double> level_ceilings(std::span<const UplinkChannel> channels, const BackhaulTree& tree) {
  const std::size_t num_aps = tree.num_aps();
  std::vector<double> ceiling(num_aps, kInf);
  std::vector<std::vector<NodeId>> aps_below(tree.num_nodes());

  for (const NodeId node : tree.bottom_up()) {
    if (node == tree.root()) break;
    const double cap = tree.capacity_bps(node);
    if (tree.is_ap(node)) {
      aps_below[node] = {node};
      const auto& c = channels[node];
      // Level at which W log2(level W / E) reaches the capacity.
      ceiling[node] = std::isinf(cap) ? kInf : c.noise_level() * std::exp2(cap / c.bandwidth_hz());
      continue;
    }
    auto& below = aps_below[node];
    for (const NodeId child : tree.children(node)) {
      below.insert(below.end(), aps_below[child].begin(), aps_below[child].end());
    }
    if (std::isinf(cap)) continue;
    auto supply = [&](double level) {
      double total = 0.0;
      for (const NodeId ap : below) total += rate_at_level(channels[ap], std::min(level, ceiling[ap]));
      return total;
    };
    double lo = kInf;
    for (const NodeId ap : below) lo = std::min(lo, channels[ap].noise_level());
    const double node_ceiling = sup_below(supply, lo, cap);
    for (const NodeId ap : below) ceiling[ap] = std::min(ceiling[ap], node_ceiling);
  }
  return ceiling;
}

std::vector<double> powers_at(std::span<const UplinkChannel> channels, std::span<const double> ceiling,
                              double level) {
  std::vector<double> powers(channels.size());
  for (std::size_t k = 0; k < channels.size(); ++k) {
    powers[k] = power_at_level(channels[k], std::min(level, ceiling[k]));
  }
  return powers;
}

// Largest rate gain from moving (or adding, if the budget allows) `delta`
// watts between uplinks.
double best_transfer_gain(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                          std::span<const double> powers, double p_max_w, double delta) {
  const double base = evaluate_rate(channels, tree, powers);
  double used = 0.0;
  for (double p : powers) used += p;
  std::vector<double> probe(powers.begin(), powers.end());
  double best = -kInf;
  for (std::size_t to = 0; to < powers.size(); ++to) {
    if (used + delta <= p_max_w) {
      probe[to] += delta;
      best = std::max(best, evaluate_rate(channels, tree, probe) - base);
      probe[to] = powers[to];
    }
    for (std::size_t from = 0; from < powers.size(); ++from) {
      if (from == to || powers[from] <= 0.0) continue;
      const double moved = std::min(delta, powers[from]);
      probe[from] -= moved;
      probe[to] += moved;
      best = std::max(best, (evaluate_rate(channels, tree, probe) - base) * delta / moved);
      probe[from] = powers[from];
      probe[to] = powers[to];
    }
  }
  return best;
}

}  // namespace

OracleResult optimal_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                          double p_max_w, double tol_bps) {
  check_instance(channels, tree, p_max_w);
  if (!(tol_bps > 0.0)) throw InvalidParameter("tol_bps must be positive");

  const std::vector<double> ceiling = level_ceilings(channels, tree);
  auto total_power = [&](double level) {
    double total = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) {
      total += power_at_level(channels[k], std::min(level, ceiling[k]));
    }
    return total;
  };
  double lowest = kInf;
  for (const auto& c : channels) lowest = std::min(lowest, c.noise_level());
  const double level = sup_below(total_power, lowest, p_max_w);

  OracleResult result;
  result.method = OracleMethod::kNestedWaterfilling;
  result.level = level;
  result.optimal_powers_w = powers_at(channels, ceiling, level);
  result.optimal_rate_bps = evaluate_rate(channels, tree, result.optimal_powers_w);

  // Dual gap nu (p_max - sum P) with nu = 1 / (level ln 2), the marginal
  // rate per watt of an uplink sitting at the common level.
  double dual_gap = 0.0;
  if (std::isfinite(level)) {
    const double slack = std::max(p_max_w - total_power(level), 0.0);
    dual_gap = slack / (level * std::numbers::ln2);
  }
  const double delta = 1e-3 * p_max_w;
  const double gain = best_transfer_gain(channels, tree, result.optimal_powers_w, p_max_w, delta);
  result.tolerance_bps = std::max({dual_gap, gain * p_max_w / delta, 0.0});
  result.certified = result.tolerance_bps <= tol_bps;
  return result;
}

GridResult grid_oracle(std::span<const UplinkChannel> channels, const BackhaulTree& tree, double p_max_w,
                       double step_w) {
  check_instance(channels, tree, p_max_w);
  if (channels.size() > kMaxGridAps) {
    throw ProblemTooLarge("grid oracle handles at most " + std::to_string(kMaxGridAps) + " APs, got " +
                          std::to_string(channels.size()));
  }
  if (!(step_w > 0.0) || step_w > p_max_w) throw InvalidParameter("grid step must lie in (0, p_max]");

  const auto steps = static_cast<long>(std::floor(p_max_w / step_w * (1.0 + 1e-12)));
  const std::size_t num_aps = channels.size();
  std::vector<long> index(num_aps, 0);
  std::vector<double> powers(num_aps, 0.0);
  GridResult best;
  best.rate_bps = -1.0;

  // Odometer over the first K-1 coordinates.
  for (;;) {
    long used = 0;
    for (std::size_t k = 0; k + 1 < num_aps; ++k) used += index[k];
    if (used <= steps) {
      index[num_aps - 1] = steps - used;
      for (std::size_t k = 0; k < num_aps; ++k) powers[k] = static_cast<double>(index[k]) * step_w;
      const double rate = evaluate_rate(channels, tree, powers);
      if (rate > best.rate_bps) {
        best.rate_bps = rate;
        best.powers_w = powers;
      }
    }
    std::size_t k = 0;
    for (; k + 1 < num_aps; ++k) {
      if (++index[k] <= steps) break;
      index[k] = 0;
    }
    if (k + 1 >= num_aps) break;
  }
  return best;
}

double grid_resolution_bound(std::span<const UplinkChannel> channels,
                             std::span<const double> optimal_powers_w, double step_w) {
  if (channels.size() != optimal_powers_w.size()) throw InvalidParameter("length mismatch");
  double bound = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const double p = optimal_powers_w[k];
    bound += channels[k].rate_bps(p) - channels[k].rate_bps(std::max(p - step_w, 0.0));
  }
  return bound;
}

BaselineResult classic_wf_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                               double p_max_w) {
  check_instance(channels, tree, p_max_w);
  const auto candidates = as_candidates(channels);
  BaselineResult out;
  out.powers_w = waterfill_alloc(waterfill_level(p_max_w, candidates), channels);
  out.rate_bps = evaluate_rate(channels, tree, out.powers_w);
  return out;
}

}  // namespace wfbh
