#include "wfbh/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/test_oracles.hpp"
#include "wfbh/errors.hpp"

namespace wfbh {
namespace {

constexpr double kInf = kUnconstrained;
constexpr double kK2OptimalRate = 3904056.5486936937;
constexpr double kK2OptimalP1 = 0.04142135623730952;

std::vector<UplinkChannel> k2_channels() {
  return {UplinkChannel::from_effective_noise(1e6, 0.1), UplinkChannel::from_effective_noise(1e6, 0.1)};
}

BackhaulTree k2_tree(double eta1) {
  return validate_tree({{0, 2}, {1, 2}, {2, 3}}, {{0, eta1}, {1, kInf}, {2, kInf}}, 2, 4);
}

TEST(OptimalRate, UnconstrainedEqualsClassicWaterfilling) {
  const auto ch = k2_channels();
  const auto tree = k2_tree(kInf);
  const auto opt = optimal_rate(ch, tree, 1.0);
  const auto wf = classic_wf_rate(ch, tree, 1.0);
  EXPECT_TRUE(opt.certified);
  EXPECT_NEAR(opt.optimal_rate_bps, wf.rate_bps, kDefaultOracleTolBps);
  EXPECT_NEAR(wf.rate_bps, 2e6 * std::log2(6.0), 1e-6);
}

TEST(OptimalRate, SingleBottleneckSaturates) {
  const std::vector<UplinkChannel> ch{UplinkChannel::from_effective_noise(1e6, 0.1)};
  const auto tree = validate_tree({{0, 1}}, {{0, 1e6}}, 1, 2);
  const auto opt = optimal_rate(ch, tree, 1.0);
  EXPECT_NEAR(opt.optimal_rate_bps, 1e6, kDefaultOracleTolBps);
  EXPECT_LE(opt.optimal_rate_bps, 1e6);
  EXPECT_NEAR(opt.optimal_powers_w[0], 0.1 * (std::pow(2.0, 1.0) - 1.0), 1e-3);
}

TEST(OptimalRate, BottleneckExampleMatchesClosedForm) {
  const auto opt = optimal_rate(k2_channels(), k2_tree(0.5e6), 1.0);
  EXPECT_TRUE(opt.certified);
  EXPECT_NEAR(opt.optimal_rate_bps, kK2OptimalRate, kDefaultOracleTolBps);
  EXPECT_LE(opt.optimal_rate_bps, kK2OptimalRate + 1e-6);
  EXPECT_NEAR(opt.optimal_powers_w[0], kK2OptimalP1, 1e-3);
  EXPECT_NEAR(evaluate_rate(k2_channels(), k2_tree(0.5e6), opt.optimal_powers_w), opt.optimal_rate_bps, 1e-6);
}

TEST(GridOracle, BottleneckExample) {
  const auto ch = k2_channels();
  const auto tree = k2_tree(0.5e6);
  const auto grid = grid_oracle(ch, tree, 1.0, 1e-3);
  EXPECT_NEAR(grid.powers_w[0], 0.042, 1e-12);
  EXPECT_LE(grid.rate_bps, kK2OptimalRate);
  const auto opt = optimal_rate(ch, tree, 1.0);
  EXPECT_LE(opt.optimal_rate_bps - grid.rate_bps,
            kDefaultOracleTolBps + grid_resolution_bound(ch, opt.optimal_powers_w, 1e-3));
}

TEST(GridOracle, SingleApUsesFullBudget) {
  const std::vector<UplinkChannel> ch{UplinkChannel::from_effective_noise(2e6, 0.05)};
  const auto tree = validate_tree({{0, 1}}, {{0, 1e12}}, 1, 2);
  EXPECT_DOUBLE_EQ(grid_oracle(ch, tree, 1.0, 1e-2).rate_bps, ch[0].rate_bps(1.0));
}

TEST(GridOracle, SymmetricSplit) {
  const auto grid = grid_oracle(k2_channels(), k2_tree(kInf), 1.0, 1e-3);
  EXPECT_NEAR(grid.powers_w[0], 0.5, 1e-3 + 1e-12);
}

TEST(GridOracle, RefusesLargeProblems) {
  std::vector<UplinkChannel> ch(4, UplinkChannel::from_effective_noise(1e6, 0.1));
  const auto tree = validate_tree({{0, 4}, {1, 4}, {2, 4}, {3, 4}}, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 4, 5);
  EXPECT_THROW(grid_oracle(ch, tree, 1.0, 1e-2), ProblemTooLarge);
}

TEST(ClassicWf, LosesToOptimumWhenBottleneckBinds) {
  const auto ch = k2_channels();
  const auto tree = k2_tree(0.5e6);
  const auto wf = classic_wf_rate(ch, tree, 1.0);
  EXPECT_EQ(wf.powers_w, (std::vector<double>{0.5, 0.5}));
  EXPECT_NEAR(wf.rate_bps, 0.5e6 + 1e6 * std::log2(6.0), 1e-6);
  EXPECT_LT(wf.rate_bps, grid_oracle(ch, tree, 1.0, 1e-3).rate_bps);
}

TEST(ClassicWf, ZeroCapacityGivesZero) {
  const auto ch = k2_channels();
  const auto tree = validate_tree({{0, 2}, {1, 2}, {2, 3}}, {{0, 0.0}, {1, 0.0}, {2, kInf}}, 2, 4);
  EXPECT_EQ(classic_wf_rate(ch, tree, 1.0).rate_bps, 0.0);
  EXPECT_EQ(optimal_rate(ch, tree, 1.0).optimal_rate_bps, 0.0);
}

TEST(OptimalRate, Idempotent) {
  const auto a = optimal_rate(k2_channels(), k2_tree(0.5e6), 1.0);
  const auto b = optimal_rate(k2_channels(), k2_tree(0.5e6), 1.0);
  EXPECT_EQ(a.optimal_rate_bps, b.optimal_rate_bps);
  EXPECT_EQ(a.optimal_powers_w, b.optimal_powers_w);
}

TEST(OptimalRate, AgreesWithGridOnRandomSmallTrees) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> log_e(-4.0, -1.0);
  const double widths[] = {1e6, 2e6, 5e6};
  for (int trial = 0; trial < 60; ++trial) {
    const auto t = testing::random_tree(rng, 3, 6, 3e7);
    const auto tree = t.build();
    std::vector<UplinkChannel> ch;
    for (std::size_t k = 0; k < t.num_aps; ++k) {
      ch.push_back(UplinkChannel::from_effective_noise(widths[rng() % 3], std::pow(10.0, log_e(rng))));
    }
    const double step = 1e-2;
    const auto opt = optimal_rate(ch, tree, 1.0);
    const auto grid = grid_oracle(ch, tree, 1.0, step);
    EXPECT_TRUE(opt.certified) << "trial " << trial;
    // The optimum is never beaten by a feasible grid point, and the grid
    // comes within its resolution bound of it.
    EXPECT_GE(opt.optimal_rate_bps + kDefaultOracleTolBps, grid.rate_bps) << "trial " << trial;
    EXPECT_LE(opt.optimal_rate_bps - grid.rate_bps,
              kDefaultOracleTolBps + grid_resolution_bound(ch, opt.optimal_powers_w, step))
        << "trial " << trial;
    double total = 0.0;
    for (double p : opt.optimal_powers_w) total += p;
    EXPECT_LE(total, 1.0 + 1e-9);
  }
}

}  // namespace
}  // namespace wfbh
