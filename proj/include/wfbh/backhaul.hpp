#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfbh {

// Node ids are zero-based: 0..K-1 are access points, K..N-2 are
// intermediate backhaul nodes and N-1 is the destination (root).
using NodeId = std::size_t;

// Capacity sentinel for a link that never constrains the flow.
inline constexpr double kUnconstrained = std::numeric_limits<double>::infinity();

enum class TreeErrorKind {
  kBadNodeId,
  kCycle,
  kUnreachable,
  kApHasChildren,
  kRootHasParent,
  kMissingCapacity,
  kNegativeCapacity,
};

const char* to_string(TreeErrorKind kind);

class TreeError : public std::invalid_argument {
 public:
  TreeError(TreeErrorKind kind, const std::string& what)
      : std::invalid_argument(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  TreeErrorKind kind() const noexcept { return kind_; }

 private:
  TreeErrorKind kind_;
};

// Immutable, validated backhaul tree with the destination at the root.
class BackhaulTree {
 public:
  // Builds a tree from a parent map and outgoing-link capacities (bps),
  // both keyed by node id and defined for every non-root node.
  static BackhaulTree validate(const std::map<NodeId, NodeId>& parent,
                               const std::map<NodeId, double>& capacity_bps, std::size_t num_aps,
                               std::size_t num_nodes);

  std::size_t num_aps() const noexcept { return num_aps_; }
  std::size_t num_nodes() const noexcept { return parent_.size(); }
  NodeId root() const noexcept { return parent_.size() - 1; }
  bool is_ap(NodeId node) const noexcept { return node < num_aps_; }

  NodeId parent(NodeId node) const;
  double capacity_bps(NodeId node) const;
  std::span<const NodeId> children(NodeId node) const { return children_.at(node); }

  // Every node, children before parents; the root comes last.
  std::span<const NodeId> bottom_up() const noexcept { return bottom_up_; }

  // Nodes from `node` (inclusive) up to the root (inclusive).
  std::vector<NodeId> path_to_root(NodeId node) const;

  // Same topology with the outgoing capacities replaced (size N-1).
  BackhaulTree with_capacities(std::span<const double> capacity_bps) const;

  std::span<const double> capacities() const noexcept { return capacity_; }

 private:
  BackhaulTree() = default;

  std::size_t num_aps_ = 0;
  std::vector<NodeId> parent_;  // parent_[root] == root
  std::vector<double> capacity_;  // size N-1
  std::vector<std::vector<NodeId>> children_;
  std::vector<NodeId> bottom_up_;
};

// Validation entry point mirroring BackhaulTree::validate.
BackhaulTree validate_tree(const std::map<NodeId, NodeId>& parent,
                           const std::map<NodeId, double>& capacity_bps, std::size_t num_aps,
                           std::size_t num_nodes);

// Five APs under two aggregation nodes: APs {0,1} -> 5, APs {2,3,4} -> 6,
// {5,6} -> destination 7. `capacity_bps` holds the 7 outgoing capacities.
BackhaulTree reference_tree_k5(std::span<const double> capacity_bps);

struct TreeRates {
  std::vector<double> node_rates_bps;  // R_p for every node, root included
  double destination_rate_bps = 0.0;   // R_N
};

// Max-flow to the destination: each node forwards min(capacity, inflow).
TreeRates achievable_rates(const BackhaulTree& tree, std::span<const double> uplink_rates_bps);

// Outgoing capacity minus incoming load for every node. The destination
// has no outgoing link and is reported as +inf.
std::vector<double> rate_differentials(const BackhaulTree& tree,
                                       std::span<const double> uplink_rates_bps,
                                       std::span<const double> node_rates_bps);

enum class NodeState : std::uint8_t {
  kUnderUtilized = 1,
  kBalanced = 2,
  kOverLoaded = 3,
};

inline int to_int(NodeState s) noexcept { return static_cast<int>(s); }

NodeState classify_state(double differential_bps, double tau_bps);
std::vector<NodeState> classify_states(std::span<const double> differentials_bps, double tau_bps);

// Worst node state on each AP's path to the destination (one per AP).
std::vector<NodeState> effective_states(const BackhaulTree& tree, std::span<const NodeState> states);

struct NodeStateReport {
  std::vector<double> rates_bps;
  std::vector<double> differentials_bps;
  std::vector<NodeState> states;
  std::vector<NodeState> effective_states;
  double destination_rate_bps = 0.0;
};

NodeStateReport assess_backhaul(const BackhaulTree& tree, std::span<const double> uplink_rates_bps,
                                double tau_bps);

}  // namespace wfbh
