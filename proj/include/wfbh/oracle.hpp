#pragma once

#include <span>
#include <vector>

#include "wfbh/backhaul.hpp"
#include "wfbh/channel.hpp"

namespace wfbh {

enum class OracleMethod { kNestedWaterfilling, kGrid };

const char* to_string(OracleMethod method);

struct OracleResult {
  double optimal_rate_bps = 0.0;
  std::vector<double> optimal_powers_w;
  OracleMethod method = OracleMethod::kNestedWaterfilling;
  // Largest of the dual gap and the first-order improvement found by
  // pairwise power transfers, in bps.
  double tolerance_bps = 0.0;
  bool certified = false;
  // Common water level of the unconstrained uplinks; +inf when the budget
  // exceeds what the backhaul can carry.
  double level = 0.0;
};

inline constexpr double kDefaultOracleTolBps = 1e3;

// End-to-end rate R_N(P) delivered through the tree.
double evaluate_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                     std::span<const double> powers_w);

// Maximum of R_N(P) over {P >= 0, sum P <= p_max}. Every link capacity turns
// into a ceiling on the water level of the uplinks behind it; the global
// level is then set by bisection on the power budget.
OracleResult optimal_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                          double p_max_w, double tol_bps = kDefaultOracleTolBps);

struct GridResult {
  double rate_bps = 0.0;
  std::vector<double> powers_w;
};

inline constexpr std::size_t kMaxGridAps = 3;

// Exhaustive search over {0, step, 2 step, ...}^K with sum <= p_max.
// R_N is non-decreasing in each power, so the last coordinate always takes
// the remaining grid budget. Refuses K > 3.
GridResult grid_oracle(std::span<const UplinkChannel> channels, const BackhaulTree& tree, double p_max_w,
                       double step_w);

// Worst-case rate lost by snapping `optimal_powers_w` down to a grid of
// spacing `step_w`: sum_k [r_k(P_k) - r_k(max(P_k - step, 0))].
double grid_resolution_bound(std::span<const UplinkChannel> channels,
                             std::span<const double> optimal_powers_w, double step_w);

struct BaselineResult {
  double rate_bps = 0.0;
  std::vector<double> powers_w;
};

// Waterfilling over all uplinks as if the backhaul were ideal, evaluated
// through the actual tree.
BaselineResult classic_wf_rate(std::span<const UplinkChannel> channels, const BackhaulTree& tree,
                               double p_max_w);

}  // namespace wfbh
