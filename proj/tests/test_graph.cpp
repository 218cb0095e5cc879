#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

TEST(Graph, RejectsSelfLoopsAndBadCosts) {
  DirectedMultigraph g(2);
  EXPECT_THROW(g.add_edge(0, 0, 1), ArgumentError);
  EXPECT_THROW(g.add_edge(0, 1, -1), ArgumentError);
  EXPECT_THROW(g.add_edge(0, 1, std::nan("")), ArgumentError);
  EXPECT_THROW(g.add_edge(0, 2, 1), ArgumentError);
  EXPECT_THROW(g.add_vertex("v0"), ArgumentError);
}

TEST(Graph, ParallelEdgesKeepDistinctIds) {
  DirectedMultigraph g(2);
  const auto a = g.add_edge(0, 1, 2);
  const auto b = g.add_edge(0, 1, 3);
  EXPECT_NE(a, b);
  EXPECT_EQ(g.out_edges(0).size(), 2u);
  EXPECT_EQ(g.in_edges(1).size(), 2u);
  const std::vector<EdgeId> both{a, b};
  EXPECT_DOUBLE_EQ(g.cost_of(both), 5.0);
}

TEST(Graph, ReversedKeepsIdsAndCosts) {
  const auto inst = diamond();
  const auto r = inst.graph.reversed();
  ASSERT_EQ(r.num_edges(), inst.graph.num_edges());
  for (const auto& e : inst.graph.edges()) {
    EXPECT_EQ(r.edge(e.id).tail, e.head);
    EXPECT_EQ(r.edge(e.id).head, e.tail);
    EXPECT_EQ(r.edge(e.id).cost, e.cost);
  }
}

TEST(Graph, ReachableSetAndNormalizedEdges) {
  const auto inst = diamond();
  const auto reach = reachable_set(inst.graph, 1, Direction::kForward);
  EXPECT_EQ(reach, (std::vector<VertexId>{1, 2, 3}));
  const std::vector<EdgeId> messy{3, 1, 3, 0};
  EXPECT_EQ(normalized_edge_set(messy), (std::vector<EdgeId>{0, 1, 3}));
}

TEST(Graph, InstanceValidation) {
  auto inst = diamond();
  EXPECT_NO_THROW(inst.validate());
  inst.terminals = {0};
  EXPECT_THROW(inst.validate(), ArgumentError);
  inst.terminals = {3, 3};
  EXPECT_THROW(inst.validate(), ArgumentError);
  inst.terminals = {};
  EXPECT_THROW(inst.validate(), ArgumentError);
}

TEST(MaxFlow, UnitFlowMatchesDisjointPathOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 3 + static_cast<int>(gen() % 3);
    const auto g = random_multigraph(n, 2 + static_cast<int>(gen() % 9), gen);
    const auto r = max_flow_unit(g, 0, n - 1);
    const auto paths = simple_path_masks(g, all_edges(g), 0, n - 1);
    EXPECT_EQ(r.value >= 1, !paths.empty());
    EXPECT_EQ(r.value >= 2, brute_two_disjoint(g, all_edges(g), 0, n - 1)) << "trial " << trial;
  }
}

TEST(MaxFlow, LimitCapsTheValue) {
  DirectedMultigraph g(2);
  for (int i = 0; i < 5; ++i) g.add_edge(0, 1, 1);
  EXPECT_EQ(max_flow_unit(g, 0, 1).value, 5);
  const std::vector<char> mask(5, 1);
  EXPECT_EQ(max_flow_unit_masked(g, mask, 0, 1, 2).value, 2);
}

TEST(MaxFlow, CapacitatedValueEqualsCut) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> cap(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_multigraph(5, 12, gen);
    std::vector<double> caps(g.num_edges());
    for (auto& c : caps) c = cap(gen);
    const auto r = max_flow_capacitated(g, caps, 0, 4);
    EXPECT_NEAR(r.value, r.cut_capacity, 1e-9);
    double cut = 0.0;
    for (EdgeId e : r.cut) cut += caps[e];
    EXPECT_NEAR(cut, r.cut_capacity, 1e-9);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      EXPECT_GE(r.edge_flow[e], -1e-12);
      EXPECT_LE(r.edge_flow[e], caps[e] + 1e-12);
    }
  }
}

}  // namespace
