#include "wfbh/backhaul.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "wfbh/errors.hpp"

namespace wfbh {

const char* to_string(TreeErrorKind kind) {
  switch (kind) {
    case TreeErrorKind::kBadNodeId: return "bad node id";
    case TreeErrorKind::kCycle: return "cycle";
    case TreeErrorKind::kUnreachable: return "unreachable node";
    case TreeErrorKind::kApHasChildren: return "access point with children";
    case TreeErrorKind::kRootHasParent: return "destination with a parent";
    case TreeErrorKind::kMissingCapacity: return "missing capacity";
    case TreeErrorKind::kNegativeCapacity: return "negative capacity";
  }
  return "unknown";
}

namespace {

std::string node_name(NodeId id) { return "node " + std::to_string(id); }

}  // namespace

BackhaulTree BackhaulTree::validate(const std::map<NodeId, NodeId>& parent,
                                    const std::map<NodeId, double>& capacity_bps,
                                    std::size_t num_aps, std::size_t num_nodes) {
  if (num_aps < 1) throw TreeError(TreeErrorKind::kBadNodeId, "at least one access point required");
  if (num_nodes <= num_aps) {
    throw TreeError(TreeErrorKind::kBadNodeId, "destination must not be an access point");
  }
  const NodeId root = num_nodes - 1;

  for (const auto& [child, par] : parent) {
    if (child >= num_nodes || par >= num_nodes) {
      throw TreeError(TreeErrorKind::kBadNodeId,
                      "parent entry " + std::to_string(child) + "->" + std::to_string(par) +
                          " outside 0.." + std::to_string(root));
    }
  }
  for (const auto& [node, cap] : capacity_bps) {
    if (node >= num_nodes) throw TreeError(TreeErrorKind::kBadNodeId, "capacity for " + node_name(node));
    if (node == root) {
      throw TreeError(TreeErrorKind::kBadNodeId, "destination has no outgoing link to size");
    }
  }

  // Any walk that revisits a node is a cycle.
  for (const auto& [start, unused] : parent) {
    std::vector<bool> seen(num_nodes, false);
    NodeId cur = start;
    seen[cur] = true;
    for (auto it = parent.find(cur); it != parent.end(); it = parent.find(cur)) {
      cur = it->second;
      if (seen[cur]) throw TreeError(TreeErrorKind::kCycle, "walk from " + node_name(start) + " loops");
      seen[cur] = true;
    }
  }

  if (parent.contains(root)) throw TreeError(TreeErrorKind::kRootHasParent, node_name(root));
  for (const auto& [child, par] : parent) {
    if (par < num_aps) {
      throw TreeError(TreeErrorKind::kApHasChildren,
                      node_name(par) + " is an access point but parents " + node_name(child));
    }
  }
  for (NodeId node = 0; node < root; ++node) {
    if (!parent.contains(node)) {
      throw TreeError(TreeErrorKind::kUnreachable, node_name(node) + " has no route to the destination");
    }
  }

  // Acyclic and every non-root node has a parent, so every walk ends at the
  // root. Intermediate nodes must still carry traffic from some AP.
  std::vector<bool> on_ap_walk(num_nodes, false);
  for (NodeId ap = 0; ap < num_aps; ++ap) {
    for (NodeId cur = ap; !on_ap_walk[cur]; cur = parent.at(cur)) {
      on_ap_walk[cur] = true;
      if (cur == root) break;
    }
  }
  for (NodeId node = num_aps; node < num_nodes; ++node) {
    if (!on_ap_walk[node]) {
      throw TreeError(TreeErrorKind::kUnreachable, node_name(node) + " lies on no access-point route");
    }
  }

  BackhaulTree tree;
  tree.num_aps_ = num_aps;
  tree.parent_.assign(num_nodes, root);
  tree.capacity_.assign(root, 0.0);
  tree.children_.assign(num_nodes, {});
  for (NodeId node = 0; node < root; ++node) {
    const auto cap = capacity_bps.find(node);
    if (cap == capacity_bps.end()) throw TreeError(TreeErrorKind::kMissingCapacity, node_name(node));
    if (std::isnan(cap->second) || cap->second < 0.0) {
      throw TreeError(TreeErrorKind::kNegativeCapacity, node_name(node));
    }
    tree.capacity_[node] = cap->second;
    tree.parent_[node] = parent.at(node);
    tree.children_[tree.parent_[node]].push_back(node);
  }

  // Iterative post-order from the root.
  std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
  tree.bottom_up_.reserve(num_nodes);
  while (!stack.empty()) {
    auto& [node, next_child] = stack.back();
    if (next_child < tree.children_[node].size()) {
      const NodeId child = tree.children_[node][next_child++];
      stack.emplace_back(child, 0);
    } else {
      tree.bottom_up_.push_back(node);
      stack.pop_back();
    }
  }
  return tree;
}

BackhaulTree validate_tree(const std::map<NodeId, NodeId>& parent,
                           const std::map<NodeId, double>& capacity_bps, std::size_t num_aps,
                           std::size_t num_nodes) {
  return BackhaulTree::validate(parent, capacity_bps, num_aps, num_nodes);
}

BackhaulTree reference_tree_k5(std::span<const double> capacity_bps) {
  if (capacity_bps.size() != 7) throw InvalidParameter("reference tree needs 7 capacities");
  const std::map<NodeId, NodeId> parent{{0, 5}, {1, 5}, {2, 6}, {3, 6}, {4, 6}, {5, 7}, {6, 7}};
  std::map<NodeId, double> capacity;
  for (NodeId node = 0; node < 7; ++node) capacity[node] = capacity_bps[node];
  return BackhaulTree::validate(parent, capacity, 5, 8);
}

NodeId BackhaulTree::parent(NodeId node) const {
  if (node >= root()) throw InvalidParameter("destination has no parent");
  return parent_[node];
}

double BackhaulTree::capacity_bps(NodeId node) const {
  if (node >= root()) throw InvalidParameter("destination has no outgoing capacity");
  return capacity_[node];
}

std::vector<NodeId> BackhaulTree::path_to_root(NodeId node) const {
  if (node >= num_nodes()) throw InvalidParameter("node id out of range");
  std::vector<NodeId> path{node};
  while (path.back() != root()) path.push_back(parent_[path.back()]);
  return path;
}

BackhaulTree BackhaulTree::with_capacities(std::span<const double> capacity_bps) const {
  if (capacity_bps.size() != capacity_.size()) throw InvalidParameter("capacity vector has wrong length");
  for (double c : capacity_bps) {
    if (std::isnan(c) || c < 0.0) throw TreeError(TreeErrorKind::kNegativeCapacity, "replacement capacity");
  }
  BackhaulTree copy = *this;
  copy.capacity_.assign(capacity_bps.begin(), capacity_bps.end());
  return copy;
}

TreeRates achievable_rates(const BackhaulTree& tree, std::span<const double> uplink_rates_bps) {
  if (uplink_rates_bps.size() != tree.num_aps()) {
    throw InvalidParameter("uplink rate vector length does not match AP count");
  }
  TreeRates out;
  out.node_rates_bps.assign(tree.num_nodes(), 0.0);
  for (const NodeId node : tree.bottom_up()) {
    double inflow = 0.0;
    if (tree.is_ap(node)) {
      inflow = uplink_rates_bps[node];
      if (!(inflow >= 0.0)) throw InvalidParameter("uplink rates must be non-negative");
    } else {
      for (const NodeId child : tree.children(node)) inflow += out.node_rates_bps[child];
    }
    out.node_rates_bps[node] = node == tree.root() ? inflow : std::min(tree.capacity_bps(node), inflow);
  }
  out.destination_rate_bps = out.node_rates_bps[tree.root()];
  return out;
}

std::vector<double> rate_differentials(const BackhaulTree& tree,
                                       std::span<const double> uplink_rates_bps,
                                       std::span<const double> node_rates_bps) {
  if (uplink_rates_bps.size() != tree.num_aps() || node_rates_bps.size() != tree.num_nodes()) {
    throw InvalidParameter("rate vector lengths do not match the tree");
  }
  std::vector<double> v(tree.num_nodes(), kUnconstrained);
  for (NodeId node = 0; node < tree.root(); ++node) {
    double load = 0.0;
    if (tree.is_ap(node)) {
      load = uplink_rates_bps[node];
    } else {
      for (const NodeId child : tree.children(node)) load += node_rates_bps[child];
    }
    v[node] = tree.capacity_bps(node) - load;
  }
  return v;
}

NodeState classify_state(double differential_bps, double tau_bps) {
  if (!(tau_bps > 0.0)) throw InvalidParameter("tau must be positive");
  if (std::isnan(differential_bps)) throw InvalidParameter("rate differential is NaN");
  if (differential_bps >= 0.0) return NodeState::kUnderUtilized;
  if (differential_bps >= -tau_bps) return NodeState::kBalanced;
  return NodeState::kOverLoaded;
}

std::vector<NodeState> classify_states(std::span<const double> differentials_bps, double tau_bps) {
  std::vector<NodeState> out;
  out.reserve(differentials_bps.size());
  for (double v : differentials_bps) out.push_back(classify_state(v, tau_bps));
  return out;
}

std::vector<NodeState> effective_states(const BackhaulTree& tree, std::span<const NodeState> states) {
  if (states.size() + 1 < tree.num_nodes()) throw InvalidParameter("missing node states");
  // The destination contributes the under-utilized state.
  auto state_of = [&](NodeId node) {
    return node == tree.root() ? NodeState::kUnderUtilized : states[node];
  };
  std::vector<NodeState> out(tree.num_aps());
  for (NodeId ap = 0; ap < tree.num_aps(); ++ap) {
    NodeState worst = NodeState::kUnderUtilized;
    for (NodeId cur = ap;; cur = tree.parent(cur)) {
      worst = std::max(worst, state_of(cur));
      if (tree.parent(cur) == tree.root()) break;
    }
    out[ap] = worst;
  }
  return out;
}

NodeStateReport assess_backhaul(const BackhaulTree& tree, std::span<const double> uplink_rates_bps,
                                double tau_bps) {
  NodeStateReport report;
  TreeRates rates = achievable_rates(tree, uplink_rates_bps);
  report.destination_rate_bps = rates.destination_rate_bps;
  report.differentials_bps = rate_differentials(tree, uplink_rates_bps, rates.node_rates_bps);
  report.rates_bps = std::move(rates.node_rates_bps);
  report.states = classify_states(report.differentials_bps, tau_bps);
  report.effective_states = effective_states(tree, report.states);
  return report;
}

}  // namespace wfbh
