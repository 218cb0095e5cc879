#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  auto a = Rng::stream(7, 3), b = Rng::stream(7, 3), c = Rng::stream(7, 4);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
  }
  Rng u(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Gkr, ClampIsMonotoneAndIdempotent) {
  const auto inst = planted(5, 12, 2, 4);
  const auto tree = build_shallow_tree(inst, {});
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  std::vector<double> x(tree.num_edges());
  for (auto& v : x) v = u(gen);
  const auto c = monotone_clamp(tree, x);
  for (int e = 0; e < tree.num_edges(); ++e) {
    EXPECT_GE(c[e], 0.0);
    EXPECT_LE(c[e], std::clamp(x[e], 0.0, 1.0));
    if (tree.parent_edge(e) >= 0) EXPECT_LE(c[e], c[tree.parent_edge(e)]);
  }
  EXPECT_EQ(monotone_clamp(tree, c), c);
}

TEST(Gkr, MarkedSetIsARootedSubtree) {
  const auto s = solve_lp(planted(6, 14, 2, 8));
  ASSERT_TRUE(s.lp.optimal());
  std::vector<double> x(s.tree.num_edges());
  for (int e = 0; e < s.tree.num_edges(); ++e) x[e] = s.lp.values[s.model.index.xhat(e)];
  Rng rng(2);
  for (int r = 0; r < 500; ++r) {
    const auto marked = gkr_round(s.tree, x, rng);
    for (int e = 0; e < s.tree.num_edges(); ++e)
      if (marked[e] && s.tree.parent_edge(e) >= 0) EXPECT_TRUE(marked[s.tree.parent_edge(e)]);
  }
}

TEST(Gkr, ZeroEdgesAreNeverMarked) {
  const auto inst = diamond();
  const auto tree = build_shallow_tree(inst, {});
  std::vector<double> x(tree.num_edges(), 0.0);
  x[0] = 1.0;
  Rng rng(1);
  for (int r = 0; r < 100; ++r) {
    const auto marked = gkr_round(tree, x, rng);
    EXPECT_TRUE(marked[0]);
    for (int e = 1; e < tree.num_edges(); ++e) EXPECT_FALSE(marked[e]);
  }
}

TEST(Decompose, WeightsSumToOneAndPathsAreSimple) {
  // Acyclic unit flow that uses the chord 1->2.
  const auto inst = diamond();
  const std::vector<double> flow{0.6, 0.4, 0.3, 0.7, 0.3};
  const auto d = decompose_flow(inst.graph, 0, 3, flow, 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k < d.paths.size(); ++k) {
    total += d.weights[k];
    EXPECT_TRUE(d.paths[k].simple);
    EXPECT_EQ(inst.graph.edge(d.paths[k].edges.front()).tail, 0);
    EXPECT_EQ(inst.graph.edge(d.paths[k].edges.back()).head, 3);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (EdgeId e = 0; e < inst.graph.num_edges(); ++e) EXPECT_NEAR(d.marginal(e), flow[e], 1e-12);
}

TEST(Decompose, InconsistentFlowThrows) {
  const auto inst = diamond();
  const std::vector<double> flow{0.5, 0.0, 0.0, 0.0, 0.0};  // dead end at 1
  EXPECT_THROW(decompose_flow(inst.graph, 0, 3, flow, 0.5), ModelError);
}

TEST(Rounding, DefaultCounts) {
  EXPECT_EQ(default_outer_iterations(2, 4), static_cast<int>(std::ceil(40 * std::log(4.0))));
  EXPECT_EQ(default_outer_iterations(2, 1), 1);
  EXPECT_EQ(default_samples(4, 2), static_cast<int>(std::ceil(18 * std::log(2.0))));
  EXPECT_EQ(default_samples(4, 1), 1);
}

TEST(Rounding, DeterministicPerSeed) {
  const auto s = solve_lp(planted(6, 14, 2, 12));
  ASSERT_TRUE(s.lp.optimal());
  RoundingConfig rc;
  rc.seed = 9;
  const auto a = round_solution(s.inst, s.tree, s.model, s.lp, rc);
  const auto b = round_solution(s.inst, s.tree, s.model, s.lp, rc);
  EXPECT_EQ(a.edges, b.edges);
  EXPECT_EQ(a.provenance, b.provenance);
  rc.threads = 3;
  const auto c = round_solution(s.inst, s.tree, s.model, s.lp, rc);
  EXPECT_EQ(a.edges, c.edges);
  EXPECT_EQ(a.provenance, c.provenance);
}

TEST(Rounding, EveryEdgeHasProvenance) {
  const auto s = solve_lp(planted(6, 14, 2, 13));
  ASSERT_TRUE(s.lp.optimal());
  const Rounder rounder(s.inst, s.tree, s.model, s.lp, {});
  const auto sol = rounder.run();
  ASSERT_EQ(sol.provenance.size(), sol.edges.size());
  for (const auto& [e, p] : sol.provenance) {
    EXPECT_LT(p.iteration, rounder.iterations());
    EXPECT_LT(p.sample, rounder.samples());
    const auto& path = rounder.distribution(p.tree_edge);
    EXPECT_GT(path.marginal(e), 0.0);
  }
}

TEST(Rounding, ReverseDeleteKeepsFeasibilityAndNeverCostsMore) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = solve_lp(planted(6, 14, 2, 20 + seed));
    ASSERT_TRUE(s.lp.optimal());
    RoundingConfig rc;
    rc.iteration_multiplier = 2.0;
    const auto raw = round_solution(s.inst, s.tree, s.model, s.lp, rc);
    if (!raw.verified_feasible()) continue;
    const auto pruned = reverse_delete(s.inst, raw);
    EXPECT_TRUE(pruned.verified_feasible());
    EXPECT_TRUE(brute_feasible(s.inst, mask_of(s.inst.graph, pruned.edges)));
    EXPECT_LE(pruned.cost, raw.cost);
    for (EdgeId e : pruned.edges) EXPECT_TRUE(raw.contains(e));
    // Minimal: no single edge can be dropped.
    for (EdgeId e : pruned.edges) {
      auto mask = mask_of(s.inst.graph, pruned.edges);
      mask[e] = 0;
      EXPECT_FALSE(brute_feasible(s.inst, mask));
    }
  }
}

TEST(Rounding, RejectsNonOptimalLp) {
  const auto s = solve_lp(single_path());
  EXPECT_THROW(Rounder(s.inst, s.tree, s.model, s.lp, {}), ArgumentError);
}

}  // namespace
