#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

TEST(Verify, DiamondFeasible) {
  const auto inst = diamond();
  const std::vector<EdgeId> routes{0, 1, 2, 3};
  const auto rep = verify_2dst(inst, routes);
  EXPECT_TRUE(rep.feasible);
  EXPECT_EQ(rep.flows, (std::vector<int>{2}));
  EXPECT_FALSE(rep.witness);
  EXPECT_TRUE(menger_scan(inst, routes).empty());
}

TEST(Verify, BridgeWitness) {
  const auto inst = diamond();
  // 0->1, 1->3, 1->2, 2->3: every path leaves through edge 0.
  const std::vector<EdgeId> edges{0, 2, 3, 4};
  const auto rep = verify_2dst(inst, edges);
  EXPECT_FALSE(rep.feasible);
  EXPECT_EQ(rep.flows, (std::vector<int>{1}));
  ASSERT_TRUE(rep.witness);
  EXPECT_EQ(rep.witness->edge, 0);
  EXPECT_EQ(rep.witness->terminal, 3);
  const auto scan = menger_scan(inst, edges);
  ASSERT_EQ(scan.size(), 1u);
  EXPECT_EQ(scan[0], (std::pair<EdgeId, VertexId>{0, 3}));
}

TEST(Verify, UnreachableTerminal) {
  const auto inst = diamond();
  const std::vector<EdgeId> edges{0, 1};
  const auto rep = verify_2dst(inst, edges);
  EXPECT_FALSE(rep.feasible);
  ASSERT_TRUE(rep.witness);
  EXPECT_EQ(rep.witness->edge, -1);
  EXPECT_EQ(rep.flows, (std::vector<int>{0}));
}

TEST(Verify, ParallelEdgesCountSeparately) {
  DstInstance inst;
  inst.graph = DirectedMultigraph(2);
  inst.graph.add_edge(0, 1, 1);
  inst.graph.add_edge(0, 1, 1);
  inst.root = 0;
  inst.terminals = {1};
  EXPECT_TRUE(verify_2dst(inst, std::vector<EdgeId>{0, 1}).feasible);
  EXPECT_FALSE(verify_2dst(inst, std::vector<EdgeId>{0}).feasible);
}

TEST(Verify, UnknownEdgeThrows) {
  const auto inst = diamond();
  EXPECT_THROW(verify_2dst(inst, std::vector<EdgeId>{99}), ArgumentError);
}

TEST(Verify, MengerScanAgreesWithVerifier) {
  // Property: with every terminal reachable, verify == (menger_scan empty).
  std::mt19937_64 gen(17);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    DstInstance inst;
    inst.graph = random_multigraph(4, 3 + static_cast<int>(gen() % 8), gen);
    inst.root = 0;
    inst.terminals = {3};
    std::vector<EdgeId> all;
    for (EdgeId e = 0; e < inst.graph.num_edges(); ++e) all.push_back(e);
    const auto rep = verify_2dst(inst, all);
    if (rep.flows[0] == 0) continue;
    EXPECT_EQ(rep.feasible, menger_scan(inst, all).empty());
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Verify, FeasibilityIsMonotoneInTheEdgeSet) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = planted(5, 10, 2, 100 + trial);
    std::vector<EdgeId> sub;
    for (EdgeId e = 0; e < inst.graph.num_edges(); ++e)
      if (gen() % 2) sub.push_back(e);
    if (!verify_2dst(inst, sub).feasible) continue;
    std::vector<EdgeId> sup = sub;
    for (EdgeId e = 0; e < inst.graph.num_edges(); ++e)
      if (gen() % 2) sup.push_back(e);
    EXPECT_TRUE(verify_2dst(inst, normalized_edge_set(sup)).feasible);
  }
}

}  // namespace
