#include "wfbh/backhaul.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/test_oracles.hpp"
#include "wfbh/errors.hpp"

namespace wfbh {
namespace {

constexpr double kInf = kUnconstrained;

TreeErrorKind error_kind(const std::map<NodeId, NodeId>& parent, const std::map<NodeId, double>& capacity,
                         std::size_t k, std::size_t n) {
  try {
    (void)validate_tree(parent, capacity, k, n);
  } catch (const TreeError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "tree unexpectedly valid";
  return TreeErrorKind::kBadNodeId;
}

TEST(ValidateTree, SmallestChain) {
  const auto tree = validate_tree({{0, 1}}, {{0, 5e6}}, 1, 2);
  EXPECT_EQ(tree.root(), 1u);
  EXPECT_EQ(tree.parent(0), 1u);
  EXPECT_EQ(tree.capacity_bps(0), 5e6);
}

TEST(ValidateTree, ReferenceTopology) {
  const auto tree = reference_tree_k5(std::vector<double>(7, 1e7));
  EXPECT_EQ(tree.num_aps(), 5u);
  EXPECT_EQ(tree.num_nodes(), 8u);
  EXPECT_EQ(tree.path_to_root(3), (std::vector<NodeId>{3, 6, 7}));
  EXPECT_EQ(tree.bottom_up().back(), 7u);
}

TEST(ValidateTree, ErrorVariants) {
  EXPECT_EQ(error_kind({{0, 1}, {1, 0}}, {{0, 1.0}}, 1, 2), TreeErrorKind::kCycle);
  EXPECT_EQ(error_kind({{0, 2}, {1, 2}, {2, 1}}, {{0, 1.0}, {1, 1.0}}, 1, 3), TreeErrorKind::kCycle);
  EXPECT_EQ(error_kind({{0, 2}, {2, 1}}, {{0, 1.0}, {1, 1.0}}, 1, 3), TreeErrorKind::kRootHasParent);
  EXPECT_EQ(error_kind({{0, 2}, {1, 0}}, {{0, 1.0}, {1, 1.0}}, 2, 3), TreeErrorKind::kApHasChildren);
  EXPECT_EQ(error_kind({{0, 2}}, {{0, 1.0}, {1, 1.0}}, 2, 3), TreeErrorKind::kUnreachable);
  // Node 2 routes to the root but carries no AP traffic.
  EXPECT_EQ(error_kind({{0, 3}, {1, 3}, {2, 3}}, {{0, 1.0}, {1, 1.0}, {2, 1.0}}, 2, 4),
            TreeErrorKind::kUnreachable);
  EXPECT_EQ(error_kind({{0, 2}, {1, 2}}, {{0, 1.0}}, 2, 3), TreeErrorKind::kMissingCapacity);
  EXPECT_EQ(error_kind({{0, 1}}, {{0, -1.0}}, 1, 2), TreeErrorKind::kNegativeCapacity);
  EXPECT_EQ(error_kind({{0, 7}}, {{0, 1.0}}, 1, 2), TreeErrorKind::kBadNodeId);
  EXPECT_EQ(error_kind({{0, 1}}, {{0, 1.0}}, 1, 1), TreeErrorKind::kBadNodeId);
}

TEST(AchievableRates, ChainTakesMinimum) {
  const auto tree = validate_tree({{0, 1}}, {{0, 3e6}}, 1, 2);
  EXPECT_EQ(achievable_rates(tree, std::vector<double>{5e6}).destination_rate_bps, 3e6);
}

TEST(AchievableRates, UnconstrainedSumsUplinks) {
  const auto tree = reference_tree_k5(std::vector<double>(7, kInf));
  const std::vector<double> rates{1e6, 2e6, 3e6, 4e6, 5e6};
  EXPECT_EQ(achievable_rates(tree, rates).destination_rate_bps, 15e6);
}

TEST(AchievableRates, SharedBottleneckMatchesCutEnumeration) {
  // APs 0, 1 -> node 2 (4 Mbps) -> root 3.
  const std::vector<std::size_t> parent{2, 2, 3};
  const std::vector<double> capacity{kInf, kInf, 4e6};
  const std::vector<double> uplinks{3e6, 3e6};
  EXPECT_EQ(testing::brute_force_min_cut(parent, capacity, 2, uplinks), 4e6);
  const auto tree = validate_tree({{0, 2}, {1, 2}, {2, 3}}, {{0, kInf}, {1, kInf}, {2, 4e6}}, 2, 4);
  const auto rates = achievable_rates(tree, uplinks);
  EXPECT_EQ(rates.destination_rate_bps, 4e6);
  EXPECT_EQ(rates.node_rates_bps[0], 3e6);
}

TEST(AchievableRates, MatchesMinCutOnRandomTrees) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.0, 2e7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto t = testing::random_tree(rng, 4, 8, 3e7);
    std::vector<double> uplinks(t.num_aps);
    for (auto& u : uplinks) u = std::floor(rate(rng));
    const auto tree = t.build();
    const auto rates = achievable_rates(tree, uplinks);
    ASSERT_EQ(rates.destination_rate_bps, testing::brute_force_min_cut(t.parent, t.capacity, t.num_aps, uplinks))
        << "trial " << trial;

    // Flow sanity at every node.
    for (NodeId node = 0; node < tree.root(); ++node) {
      EXPECT_LE(rates.node_rates_bps[node], tree.capacity_bps(node));
      double inflow = 0.0;
      if (tree.is_ap(node)) {
        inflow = uplinks[node];
      } else {
        for (NodeId child : tree.children(node)) inflow += rates.node_rates_bps[child];
      }
      EXPECT_LE(rates.node_rates_bps[node], inflow);
    }
  }
}

TEST(AchievableRates, MonotoneInEachUplink) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0.0, 2e7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = testing::random_tree(rng, 4, 8, 3e7);
    const auto tree = t.build();
    std::vector<double> uplinks(t.num_aps);
    for (auto& u : uplinks) u = rate(rng);
    const double base = achievable_rates(tree, uplinks).destination_rate_bps;
    for (std::size_t k = 0; k < uplinks.size(); ++k) {
      auto bumped = uplinks;
      bumped[k] += rate(rng);
      EXPECT_GE(achievable_rates(tree, bumped).destination_rate_bps, base);
    }
  }
}

TEST(RateDifferentials, Examples) {
  const auto tree = validate_tree({{0, 2}, {1, 2}, {2, 3}}, {{0, 3e6}, {1, kInf}, {2, 1e7}}, 2, 4);
  const std::vector<double> uplinks{5e6, 1e6};
  const auto rates = achievable_rates(tree, uplinks);
  const auto v = rate_differentials(tree, uplinks, rates.node_rates_bps);
  EXPECT_EQ(v[0], -2e6);
  EXPECT_EQ(v[1], kInf);
  EXPECT_EQ(v[2], 1e7 - 4e6);
  EXPECT_EQ(v[3], kInf);
}

TEST(ClassifyStates, TableBoundaries) {
  const double tau = 5e5;
  EXPECT_EQ(classify_state(0.0, tau), NodeState::kUnderUtilized);
  EXPECT_EQ(classify_state(kInf, tau), NodeState::kUnderUtilized);
  EXPECT_EQ(classify_state(-tau, tau), NodeState::kBalanced);
  EXPECT_EQ(classify_state(-1e-9, tau), NodeState::kBalanced);
  EXPECT_EQ(classify_state(-tau - 1.0, tau), NodeState::kOverLoaded);
  EXPECT_EQ(classify_state(-kInf, tau), NodeState::kOverLoaded);
  EXPECT_THROW(classify_state(1.0, 0.0), InvalidParameter);
  EXPECT_THROW(classify_state(1.0, -1.0), InvalidParameter);
}

TEST(ClassifyStates, PartitionsTheLine) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> v(-3e6, 3e6);
  const double tau = 1e6;
  for (int i = 0; i < 10000; ++i) {
    const double x = v(rng);
    const int in1 = x >= 0.0, in2 = (x < 0.0 && x >= -tau), in3 = x < -tau;
    ASSERT_EQ(in1 + in2 + in3, 1);
    const int expected = in1 ? 1 : in2 ? 2 : 3;
    EXPECT_EQ(to_int(classify_state(x, tau)), expected);
  }
}

TEST(EffectiveStates, MaxAlongPath) {
  // AP 0 -> 2 -> 3 -> root 4; AP 1 -> 3.
  const auto tree =
      validate_tree({{0, 2}, {1, 3}, {2, 3}, {3, 4}}, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 2, 5);
  using S = NodeState;
  EXPECT_EQ(effective_states(tree, std::vector<S>{S::kUnderUtilized, S::kUnderUtilized, S::kUnderUtilized,
                                                  S::kUnderUtilized}),
            (std::vector<S>{S::kUnderUtilized, S::kUnderUtilized}));
  EXPECT_EQ(effective_states(tree, std::vector<S>{S::kUnderUtilized, S::kUnderUtilized, S::kOverLoaded,
                                                  S::kBalanced}),
            (std::vector<S>{S::kOverLoaded, S::kBalanced}));
  const auto chain = validate_tree({{0, 1}, {1, 2}}, {{0, 1.0}, {1, 1.0}}, 1, 3);
  EXPECT_EQ(effective_states(chain, std::vector<S>{S::kBalanced, S::kUnderUtilized}),
            (std::vector<S>{S::kBalanced}));
}

TEST(AssessBackhaul, ConsistentReport) {
  const auto tree = reference_tree_k5(std::vector<double>{1e6, kInf, kInf, kInf, kInf, 3e6, kInf});
  const std::vector<double> uplinks{2e6, 1.5e6, 1e6, 1e6, 1e6};
  const auto report = assess_backhaul(tree, uplinks, 5e5);
  EXPECT_EQ(report.destination_rate_bps, 1e6 + 1.5e6 + 3e6);
  EXPECT_EQ(report.states[0], NodeState::kOverLoaded);   // V = -1e6
  EXPECT_EQ(report.states[5], NodeState::kUnderUtilized);  // V = 3e6 - 2.5e6
  EXPECT_EQ(report.effective_states[0], NodeState::kOverLoaded);
  EXPECT_EQ(report.effective_states[1], NodeState::kUnderUtilized);
}

}  // namespace
}  // namespace wfbh
