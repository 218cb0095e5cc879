#include <gtest/gtest.h>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

TEST(Exact, Diamond) {
  const auto r = exact_2dst(diamond());
  ASSERT_EQ(r.status, ExactStatus::kOptimal);
  EXPECT_DOUBLE_EQ(r.cost, 4.0);
  EXPECT_EQ(r.edges, (std::vector<EdgeId>{0, 1, 2, 3}));
}

TEST(Exact, Infeasible) {
  EXPECT_EQ(exact_2dst(single_path()).status, ExactStatus::kInfeasible);
}

TEST(Exact, SizeCap) {
  const auto inst = planted(6, 30, 2, 1);
  EXPECT_THROW(exact_2dst(inst, {.max_edges = 22}), SizeError);
}

TEST(Exact, ZeroCostEdgesDoNotInflateTheSolution) {
  auto inst = diamond();
  inst.graph.add_edge(2, 1, 0);  // free but useless
  const auto r = exact_2dst(inst);
  ASSERT_TRUE(r.optimal());
  EXPECT_DOUBLE_EQ(r.cost, 4.0);
  EXPECT_TRUE(verify_2dst(inst, r.edges).feasible);
}

TEST(Exact, MatchesSubsetEnumeration) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const int n = 4 + static_cast<int>(seed % 3);
    const int h = 1 + static_cast<int>(seed % 2);
    const auto inst = planted(n, 8 + static_cast<int>(seed % 4), h, seed);
    const auto r = exact_2dst(inst);
    ASSERT_TRUE(r.optimal()) << "seed " << seed;
    EXPECT_DOUBLE_EQ(r.cost, brute_opt(inst)) << "seed " << seed;
    EXPECT_TRUE(brute_feasible(inst, mask_of(inst.graph, r.edges)));
    EXPECT_DOUBLE_EQ(r.cost, inst.graph.cost_of(r.edges));
  }
}

TEST(Exact, UnplantedInfeasibleMatchesOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomInstanceSpec spec{.n = 5, .m = 7, .h = 2, .seed = seed, .guarantee_feasible = false};
    const auto inst = random_instance(spec);
    const auto r = exact_2dst(inst);
    const double brute = brute_opt(inst);
    if (brute < 0.0) {
      EXPECT_EQ(r.status, ExactStatus::kInfeasible) << "seed " << seed;
    } else {
      ASSERT_TRUE(r.optimal());
      EXPECT_DOUBLE_EQ(r.cost, brute);
    }
  }
}

TEST(RandomInstance, ReproducibleAndPlantedFeasible) {
  RandomInstanceSpec spec{.n = 7, .m = 18, .h = 3, .seed = 5};
  const auto a = random_instance(spec), b = random_instance(spec);
  ASSERT_EQ(a.graph.num_edges(), 18);
  for (EdgeId e = 0; e < 18; ++e) {
    EXPECT_EQ(a.graph.edge(e).tail, b.graph.edge(e).tail);
    EXPECT_EQ(a.graph.edge(e).head, b.graph.edge(e).head);
    EXPECT_EQ(a.graph.edge(e).cost, b.graph.edge(e).cost);
    EXPECT_GE(a.graph.edge(e).cost, spec.cost_min);
    EXPECT_LE(a.graph.edge(e).cost, spec.cost_max);
  }
  EXPECT_EQ(a.terminals, b.terminals);
  EXPECT_EQ(a.num_terminals(), 3);
  for (std::uint64_t s = 1; s <= 30; ++s) {
    spec.seed = s;
    const auto inst = random_instance(spec);
    std::vector<EdgeId> all;
    for (EdgeId e = 0; e < inst.graph.num_edges(); ++e) all.push_back(e);
    EXPECT_TRUE(verify_2dst(inst, all).feasible) << "seed " << s;
  }
  EXPECT_THROW(random_instance({.n = 4, .m = 3, .h = 2}), ArgumentError);
}

}  // namespace
