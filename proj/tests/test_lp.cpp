#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

Constraint row(std::vector<int> idx, std::vector<double> val, Relation rel, double rhs) {
  Constraint c;
  c.index = std::move(idx);
  c.value = std::move(val);
  c.relation = rel;
  c.rhs = rhs;
  return c;
}

TEST(Simplex, SmallKnownOptimum) {
  // min -x - 2y  s.t. x + y <= 4, x + 3y <= 6, x, y in [0, 10]. Optimum (3, 1).
  LinearProgram lp;
  lp.add_variable(-1, 0, 10);
  lp.add_variable(-2, 0, 10);
  lp.add_row(row({0, 1}, {1, 1}, Relation::kLessEqual, 4));
  lp.add_row(row({0, 1}, {1, 3}, Relation::kLessEqual, 6));
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, -5.0, 1e-9);
  EXPECT_NEAR(r.x[0], 3.0, 1e-9);
  EXPECT_NEAR(r.x[1], 1.0, 1e-9);
}

TEST(Simplex, EqualityAndGreaterRows) {
  // min x + y + z  s.t. x + y = 1, y + z >= 1.5, all in [0, 1].
  LinearProgram lp;
  for (int j = 0; j < 3; ++j) lp.add_variable(1, 0, 1);
  lp.add_row(row({0, 1}, {1, 1}, Relation::kEqual, 1));
  lp.add_row(row({1, 2}, {1, 1}, Relation::kGreaterEqual, 1.5));
  const auto r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 1.5, 1e-9);
  EXPECT_LE(lp.max_violation(r.x), 1e-9);
}

TEST(Simplex, InfeasibleWithCertificate) {
  LinearProgram lp;
  lp.add_variable(1, 0, 1);
  lp.add_variable(1, 0, 1);
  lp.add_row(row({0, 1}, {1, 1}, Relation::kGreaterEqual, 3));
  const auto r = solve_lp(lp);
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(r.certificate.rows.empty());
}

TEST(Simplex, RandomBoxedLpsAreFeasibleAndStable) {
  // Random covering LPs: a feasible point exists (all ones), so the solver
  // must report optimal with a feasible x no costlier than all ones.
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp;
    const int n = 6 + static_cast<int>(gen() % 6);
    double ones = 0.0;
    for (int j = 0; j < n; ++j) ones += lp.cost[lp.add_variable(u(gen), 0, 1)];
    for (int i = 0; i < n; ++i) {
      std::vector<int> idx;
      std::vector<double> val;
      double sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (gen() % 3 == 0) idx.push_back(j), val.push_back(u(gen)), sum += val.back();
      if (idx.empty()) continue;
      lp.add_row(row(idx, val, Relation::kGreaterEqual, 0.6 * sum));
    }
    const auto r = solve_lp(lp);
    ASSERT_EQ(r.status, SolveStatus::kOptimal) << "trial " << trial;
    EXPECT_LE(lp.max_violation(r.x), 1e-8);
    EXPECT_LE(r.objective, ones + 1e-9);
  }
}

TEST(LpModel, CongestionParameter) {
  EXPECT_EQ(congestion_parameter(2, 1), 4.0);
  EXPECT_EQ(congestion_parameter(2, 4), 8.0);  // exact integer stays exact
  EXPECT_EQ(congestion_parameter(2, 3), 7.0);  // ceil(4 * 1.732)
  EXPECT_EQ(congestion_parameter(3, 8), 12.0);
  EXPECT_EQ(congestion_parameter(2, 4, 2.0), 16.0);
  EXPECT_THROW(congestion_parameter(0, 1), ArgumentError);
}

TEST(LpModel, VariableIndexRoundTrip) {
  const VarIndex vi(5, 7, 2);
  for (long j = 0; j < vi.size(); ++j) {
    EXPECT_EQ(vi.index_of(vi.key(j)), j);
    EXPECT_EQ(vi.parse_name(vi.name(j)), j);
  }
  EXPECT_THROW(vi.key(vi.size()), ArgumentError);
}

TEST(LpModel, DiamondRelaxationIsExact) {
  const auto s = solve_lp(diamond());
  ASSERT_TRUE(s.lp.optimal());
  EXPECT_NEAR(s.lp.objective, 4.0, 1e-7);
  EXPECT_LE(replay_constraints(s.model, s.lp.values).max_violation, 1e-7);
  EXPECT_GT(s.model.count_rows(RowFamily::kGst), 0);
  EXPECT_GT(s.model.count_rows(RowFamily::kCong), 0);
  EXPECT_GT(s.model.count_rows(RowFamily::kDiv), 0);
}

TEST(LpModel, InfeasibleInstanceGivesInfeasibleLp) {
  const auto s = solve_lp(single_path());
  EXPECT_EQ(s.lp.status, SolveStatus::kInfeasible);
}

TEST(LpModel, LowerBoundsExactOptimum) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto s = solve_lp(planted(5, 11, 2, seed));
    ASSERT_TRUE(s.lp.optimal());
    const double opt = brute_opt(s.inst);
    ASSERT_GE(opt, 0.0);
    EXPECT_LE(s.lp.objective, opt + 1e-6) << "seed " << seed;
  }
}

TEST(LpModel, DroppingDivRowsNeverRaisesTheBound) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = planted(5, 12, 2, 40 + seed);
    const auto tree = build_shallow_tree(inst, {});
    const double beta = congestion_parameter(2, inst.num_terminals());
    const auto full = build_lp(inst, tree, beta);
    const auto relaxed = build_lp(inst, tree, beta, {.include_div = false});
    EXPECT_EQ(relaxed.count_rows(RowFamily::kDiv), 0);
    const auto a = solve_model(full), b = solve_model(relaxed);
    ASSERT_TRUE(a.optimal() && b.optimal());
    EXPECT_LE(b.objective, a.objective + 1e-7);
  }
}

TEST(LpModel, PruningKeepsTheOptimum) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto inst = planted(5, 11, 2, 60 + seed);
    const VertexId dead = inst.graph.add_vertex("dead");
    inst.graph.add_edge(0, dead, 1);
    const double beta = congestion_parameter(2, inst.num_terminals());
    const auto pruned = build_lp(inst, build_shallow_tree(inst, {2, true, 1'000'000}), beta);
    const auto full = build_lp(inst, build_shallow_tree(inst, {2, false, 1'000'000}), beta);
    const auto a = solve_model(pruned), b = solve_model(full);
    ASSERT_TRUE(a.optimal() && b.optimal());
    EXPECT_NEAR(a.objective, b.objective, 1e-6);
  }
}

TEST(LpModel, TidyFlowsKeepsObjectiveAndRemovesCirculation) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto inst = planted(6, 15, 2, 80 + seed);
    const auto tree = build_shallow_tree(inst, {});
    const auto model = build_lp(inst, tree, congestion_parameter(2, 2));
    const auto raw = solve_model(model);
    const auto tidy = tidy_flows(model, raw);
    ASSERT_TRUE(tidy.optimal());
    EXPECT_NEAR(tidy.objective, raw.objective, 1e-7 * std::max(1.0, raw.objective));
    EXPECT_LE(replay_constraints(model, tidy.values).max_violation, 1e-7);
    EXPECT_LE(inequality1_check(tree, model, tidy), 1e-7);
  }
}

TEST(LpModel, ExportImportRoundTrip) {
  const auto inst = diamond();
  const auto tree = build_shallow_tree(inst, {});
  const auto model = build_lp(inst, tree, 4);
  const auto text = export_lp(model);
  const auto imported = import_lp(text);
  EXPECT_EQ(imported.program.num_rows(), model.program.num_rows());
  const auto r = solve_lp(imported.program);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective, 4.0, 1e-7);
}

TEST(LpModel, NonzeroCapThrows) {
  const auto inst = planted(6, 14, 2, 1);
  const auto tree = build_shallow_tree(inst, {});
  EXPECT_THROW(build_lp(inst, tree, 4, {.max_nonzeros = 100}), SizeError);
}

}  // namespace
