#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "dst2/graph.hpp"

namespace dst2 {

struct ShallowTreeConfig {
  int depth = 2;
  bool prune_unreachable = true;
  std::size_t max_nodes = 200'000;
};

struct TreeNode {
  int id = 0;
  VertexId label = 0;
  int depth = 0;
  int parent = -1;  // -1 for the root
  int copy = 0;     // 0 for the root, 1 or 2 below it
};

struct TreeEdge {
  int id = 0;
  int parent_node = 0;
  int child_node = 0;
};

/// Prefix tree of all distinct-vertex sequences of length <= D+1 that
/// start at the root, listed twice (one copy per root subtree).
///
/// Node 0 is the root; tree edge k enters node k+1, so every non-root
/// node owns exactly one tree edge. Nodes are numbered breadth-first with
/// children in ascending vertex id and copy 1 ahead of copy 2 at each
/// depth, which fixes LP variable indices.
class ShallowTree {
 public:
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int depth_bound() const { return depth_; }
  int root() const { return 0; }

  const TreeNode& node(int id) const { return nodes_.at(id); }
  const TreeEdge& edge(int id) const { return edges_.at(id); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const std::vector<TreeEdge>& edges() const { return edges_; }

  // Tree edge entering `node_id`; -1 for the root.
  int edge_into(int node_id) const { return node_id == 0 ? -1 : node_id - 1; }
  // Parent tree edge of edge `e` (rho); -1 when `e` hangs off the root.
  int parent_edge(int e) const { return edge_into(edges_.at(e).parent_node); }
  const std::vector<int>& child_edges(int node_id) const { return children_.at(node_id); }

  // Group of terminal index i: nodes labelled with that terminal.
  const std::vector<int>& group(int terminal_index) const { return groups_.at(terminal_index); }
  int num_groups() const { return static_cast<int>(groups_.size()); }
  bool in_group(int terminal_index, int node_id) const {
    return group_member_.at(terminal_index).at(node_id) != 0;
  }

  VertexId label_of_edge_tail(int e) const { return nodes_[edges_.at(e).parent_node].label; }
  VertexId label_of_edge_head(int e) const { return nodes_[edges_.at(e).child_node].label; }

  // Vertices that may appear in sequences after pruning, ascending.
  const std::vector<VertexId>& usable_vertices() const { return usable_; }

  friend ShallowTree build_shallow_tree(const DstInstance&, const ShallowTreeConfig&);

 private:
  int depth_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<TreeEdge> edges_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> groups_;
  std::vector<std::vector<char>> group_member_;
  std::vector<VertexId> usable_;
};

/// Closed-form node count 1 + 2 * sum_{i=1..D} P(n-1, i), saturating at
/// SIZE_MAX.
inline std::size_t projected_tree_nodes(std::size_t usable_vertices, int depth) {
  constexpr auto kMax = std::numeric_limits<std::size_t>::max();
  if (usable_vertices == 0) return 1;
  std::size_t sum = 0;
  std::size_t perm = 1;
  for (int i = 1; i <= depth; ++i) {
    const std::size_t avail = usable_vertices - 1;
    if (static_cast<std::size_t>(i) > avail) break;
    const std::size_t factor = avail - static_cast<std::size_t>(i) + 1;
    if (perm > kMax / factor) return kMax;
    perm *= factor;
    if (sum > kMax - perm) return kMax;
    sum += perm;
  }
  if (sum > (kMax - 1) / 2) return kMax;
  return 1 + 2 * sum;
}

// Root plus every vertex that lies on some root->terminal walk. Terminals
// are always kept so that each group is non-empty.
inline std::vector<VertexId> usable_vertices(const DstInstance& inst, bool prune) {
  const auto n = inst.graph.num_vertices();
  std::vector<char> keep(n, prune ? 0 : 1);
  if (prune) {
    std::vector<char> fwd(n, 0), bwd(n, 0);
    for (VertexId v : reachable_set(inst.graph, inst.root, Direction::kForward)) fwd[v] = 1;
    for (VertexId t : inst.terminals)
      for (VertexId v : reachable_set(inst.graph, t, Direction::kBackward)) bwd[v] = 1;
    for (VertexId v = 0; v < n; ++v) keep[v] = fwd[v] && bwd[v];
    for (VertexId t : inst.terminals) keep[t] = 1;
  }
  keep[inst.root] = 1;
  std::vector<VertexId> out;
  for (VertexId v = 0; v < n; ++v)
    if (keep[v]) out.push_back(v);
  return out;
}

inline ShallowTree build_shallow_tree(const DstInstance& inst, const ShallowTreeConfig& config) {
  inst.validate();
  if (config.depth < 1) throw ArgumentError("shallow tree depth must be >= 1");
  ShallowTree tree;
  tree.depth_ = config.depth;
  tree.usable_ = usable_vertices(inst, config.prune_unreachable);
  const std::size_t projected = projected_tree_nodes(tree.usable_.size(), config.depth);
  if (projected > config.max_nodes)
    throw SizeError("shallow tree too large", projected, config.max_nodes);

  tree.nodes_.reserve(projected);
  tree.nodes_.push_back({0, inst.root, 0, -1, 0});
  std::vector<char> on_path(inst.graph.num_vertices(), 0);

  auto mark_path = [&](int id, char value) {
    for (int v = id; v != -1; v = tree.nodes_[v].parent) on_path[tree.nodes_[v].label] = value;
  };

  // Depth 1: copy 1 children, then copy 2 children.
  for (int copy = 1; copy <= 2; ++copy)
    for (VertexId v : tree.usable_)
      if (v != inst.root)
        tree.nodes_.push_back({static_cast<int>(tree.nodes_.size()), v, 1, 0, copy});

  // Deeper levels in BFS order; the node vector doubles as the queue.
  for (std::size_t head = 1; head < tree.nodes_.size(); ++head) {
    const TreeNode parent = tree.nodes_[head];
    if (parent.depth >= config.depth) continue;
    mark_path(parent.id, 1);
    for (VertexId v : tree.usable_) {
      if (on_path[v]) continue;
      tree.nodes_.push_back(
          {static_cast<int>(tree.nodes_.size()), v, parent.depth + 1, parent.id, parent.copy});
    }
    mark_path(parent.id, 0);
  }

  const int num_nodes = static_cast<int>(tree.nodes_.size());
  tree.children_.assign(num_nodes, {});
  tree.edges_.reserve(num_nodes - 1);
  for (int id = 1; id < num_nodes; ++id) {
    const int e = id - 1;
    tree.edges_.push_back({e, tree.nodes_[id].parent, id});
    tree.children_[tree.nodes_[id].parent].push_back(e);
  }

  tree.groups_.assign(inst.terminals.size(), {});
  tree.group_member_.assign(inst.terminals.size(), std::vector<char>(num_nodes, 0));
  for (std::size_t i = 0; i < inst.terminals.size(); ++i) {
    for (int id = 1; id < num_nodes; ++id) {
      if (tree.nodes_[id].label == inst.terminals[i]) {
        tree.groups_[i].push_back(id);
        tree.group_member_[i][id] = 1;
      }
    }
  }
  return tree;
}

struct TreeStats {
  int nodes = 0;
  int edges = 0;
  std::vector<int> group_sizes;  // indexed like the instance terminals
};

inline TreeStats tree_stats(const ShallowTree& tree) {
  TreeStats s{tree.num_nodes(), tree.num_edges(), {}};
  for (int i = 0; i < tree.num_groups(); ++i)
    s.group_sizes.push_back(static_cast<int>(tree.group(i).size()));
  return s;
}

// One line per node: `node <id> label=<vertex> depth=<d> parent=<id|->`.
inline void dump_tree(std::ostream& os, const ShallowTree& tree, const DirectedMultigraph& g) {
  for (const auto& n : tree.nodes()) {
    os << "node " << n.id << " label=" << g.name(n.label) << " depth=" << n.depth << " parent=";
    if (n.parent < 0)
      os << '-';
    else
      os << n.parent;
    os << '\n';
  }
}

}  // namespace dst2
