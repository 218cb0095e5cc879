#include <gtest/gtest.h>

#include <functional>
#include <set>
#include <sstream>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

// Distinct-vertex sequences from the root of length <= D+1, counted by
// enumeration; each appears once per copy.
std::size_t enumerate_sequences(int n, int depth) {
  std::size_t count = 0;
  std::vector<char> used(n, 0);
  std::function<void(int)> rec = [&](int len) {
    if (len > depth) return;
    for (int v = 1; v < n; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      ++count;
      rec(len + 1);
      used[v] = 0;
    }
  };
  used[0] = 1;
  rec(1);
  return 1 + 2 * count;
}

TEST(ShallowTree, NodeCountMatchesEnumeration) {
  for (int n = 2; n <= 6; ++n)
    for (int depth = 1; depth <= 3; ++depth) {
      DstInstance inst;
      inst.graph = DirectedMultigraph(n);
      inst.root = 0;
      inst.terminals = {static_cast<VertexId>(n - 1)};
      const auto tree = build_shallow_tree(inst, {depth, false, 1'000'000});
      EXPECT_EQ(static_cast<std::size_t>(tree.num_nodes()), enumerate_sequences(n, depth));
      EXPECT_EQ(projected_tree_nodes(n, depth), enumerate_sequences(n, depth));
    }
}

TEST(ShallowTree, StructuralInvariants) {
  const auto inst = planted(6, 14, 2, 3);
  const auto tree = build_shallow_tree(inst, {2, false, 1'000'000});
  EXPECT_EQ(tree.num_edges(), tree.num_nodes() - 1);
  std::set<std::vector<VertexId>> seen;
  for (const auto& node : tree.nodes()) {
    if (node.id == 0) {
      EXPECT_EQ(node.label, inst.root);
      continue;
    }
    EXPECT_LT(node.parent, node.id);  // parents first
    EXPECT_LE(node.depth, tree.depth_bound());
    EXPECT_EQ(tree.edge(tree.edge_into(node.id)).child_node, node.id);
    // Labels along the root path are distinct.
    std::vector<VertexId> seq;
    for (int v = node.id; v != -1; v = tree.node(v).parent) seq.push_back(tree.node(v).label);
    EXPECT_EQ(std::set<VertexId>(seq.begin(), seq.end()).size(), seq.size());
    seq.push_back(static_cast<VertexId>(1000 + node.copy));
    EXPECT_TRUE(seen.insert(seq).second) << "duplicate sequence";
  }
  for (int e = 0; e < tree.num_edges(); ++e) {
    const int p = tree.parent_edge(e);
    if (p >= 0) EXPECT_LT(p, e);
    EXPECT_EQ(tree.label_of_edge_tail(e), tree.node(tree.edge(e).parent_node).label);
  }
  for (int t = 0; t < tree.num_groups(); ++t)
    for (int node : tree.group(t)) {
      EXPECT_EQ(tree.node(node).label, inst.terminals[t]);
      EXPECT_TRUE(tree.in_group(t, node));
    }
}

TEST(ShallowTree, PruningOnlyRemovesUselessVertices) {
  DstInstance inst = diamond();
  const VertexId dead = inst.graph.add_vertex("dead");
  inst.graph.add_edge(3, dead, 1);  // reachable but leads nowhere
  const auto full = build_shallow_tree(inst, {2, false, 1'000'000});
  const auto pruned = build_shallow_tree(inst, {2, true, 1'000'000});
  EXPECT_LT(pruned.num_nodes(), full.num_nodes());
  for (const auto& node : pruned.nodes()) EXPECT_NE(node.label, dead);
  EXPECT_EQ(pruned.usable_vertices(), (std::vector<VertexId>{0, 1, 2, 3}));
}

TEST(ShallowTree, SizeCapThrowsWithProjection) {
  const auto inst = planted(8, 20, 2, 1);
  try {
    build_shallow_tree(inst, {3, false, 100});
    FAIL() << "expected SizeError";
  } catch (const SizeError& e) {
    EXPECT_EQ(e.projected(), projected_tree_nodes(8, 3));
    EXPECT_EQ(e.cap(), 100u);
  }
}

TEST(ShallowTree, DumpListsEveryNode) {
  const auto inst = diamond();
  const auto tree = build_shallow_tree(inst, {});
  std::ostringstream os;
  dump_tree(os, tree, inst.graph);
  const auto text = os.str();
  EXPECT_EQ(static_cast<int>(std::count(text.begin(), text.end(), '\n')), tree.num_nodes());
  const auto stats = tree_stats(tree);
  EXPECT_EQ(stats.nodes, tree.num_nodes());
  ASSERT_EQ(stats.group_sizes.size(), 1u);
  EXPECT_EQ(stats.group_sizes[0], static_cast<int>(tree.group(0).size()));
}

}  // namespace
