#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

namespace {

using namespace dst2;
using namespace dst2::testing;

const std::string kSamples = DST2_SAMPLES_DIR;

void expect_same(const DstInstance& a, const DstInstance& b) {
  ASSERT_EQ(a.graph.num_vertices(), b.graph.num_vertices());
  ASSERT_EQ(a.graph.num_edges(), b.graph.num_edges());
  for (EdgeId e = 0; e < a.graph.num_edges(); ++e) {
    EXPECT_EQ(a.graph.edge(e).tail, b.graph.edge(e).tail);
    EXPECT_EQ(a.graph.edge(e).head, b.graph.edge(e).head);
    EXPECT_EQ(a.graph.edge(e).cost, b.graph.edge(e).cost);
  }
  EXPECT_EQ(a.root, b.root);
  EXPECT_EQ(a.terminals, b.terminals);
}

TEST(Io, TextAndJsonRoundTrip) {
  RandomInstanceSpec spec{.n = 6, .m = 13, .h = 2, .seed = 3};
  const auto inst = random_instance(spec);
  expect_same(inst, parse_instance(instance_text(inst)));
  expect_same(inst, parse_instance(instance_json(inst).dump()));
}

TEST(Io, SampleFilesLoad) {
  expect_same(load_instance(kSamples + "/diamond.txt"), diamond());
  const auto dss = load_dss_instance(kSamples + "/cycle4_dss.txt");
  EXPECT_EQ(dss.terminals, (std::vector<VertexId>{0, 2}));
  EXPECT_THROW(load_instance(kSamples + "/cycle4_dss.txt"), FormatError);
}

TEST(Io, FormatErrorsCarryLineNumbers) {
  try {
    parse_instance("p 2dst 2 1\ne 0 1 1\ne 0 9 1\nr 0\nt 1\n");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_instance("e 0 1 1\n"), FormatError);
  EXPECT_THROW(parse_instance("p 2dst 2 2\ne 0 1 1\nr 0\nt 1\n"), FormatError);
  EXPECT_THROW(parse_instance("{\"vertices\": [\"a\"], \"edges\": [], \"root\": \"zz\", \"terminals\": []}"),
               FormatError);
}

TEST(Io, SolutionDumpRoundTrip) {
  const auto inst = diamond();
  auto sol = SolutionSubgraph::from_edges(inst.graph, std::vector<EdgeId>{3, 0, 1, 2});
  sol.report = verify_2dst(inst, sol);
  const auto text = solution_json(sol, inst.graph, inst.terminals).dump();
  const auto back = parse_solution(text, inst.graph);
  EXPECT_EQ(back.edges, sol.edges);
  EXPECT_DOUBLE_EQ(back.cost, 4.0);
  EXPECT_EQ(parse_solution("[0, 1, 2, 3]", inst.graph).edges, sol.edges);
}

TEST(Io, LpSolutionRoundTrip) {
  const auto s = solve_lp(diamond());
  ASSERT_TRUE(s.lp.optimal());
  const auto back = parse_lp_solution(lp_solution_json(s.model, s.lp).dump(), s.model);
  ASSERT_EQ(back.values.size(), s.lp.values.size());
  for (std::size_t j = 0; j < back.values.size(); ++j) EXPECT_NEAR(back.values[j], s.lp.values[j], 1e-12);
  EXPECT_NEAR(back.objective, s.lp.objective, 1e-12);
}

TEST(Pipeline, DiamondEndToEnd) {
  const auto r = solve_pipeline(diamond(), PipelineConfig{});
  ASSERT_EQ(r.status, PipelineStatus::kFeasible);
  EXPECT_NEAR(r.lp_value, 4.0, 1e-7);
  ASSERT_TRUE(r.solution);
  EXPECT_DOUBLE_EQ(r.solution->cost, 4.0);
  EXPECT_EQ(r.beta, 4.0);
}

TEST(Pipeline, InfeasibleInstanceStopsAtPreflight) {
  const auto r = solve_pipeline(single_path(), PipelineConfig{});
  EXPECT_EQ(r.status, PipelineStatus::kInfeasibleInstance);
  EXPECT_FALSE(r.solution);
  EXPECT_EQ(preflight(single_path()), (std::vector<VertexId>{2}));
}

TEST(Pipeline, SizeCapsReportStatus) {
  PipelineConfig cfg;
  cfg.max_tree_nodes = 5;
  EXPECT_EQ(solve_pipeline(planted(6, 14, 2, 1), cfg).status, PipelineStatus::kSizeCapped);
}

TEST(Pipeline, DeterministicOutput) {
  const auto inst = planted(6, 14, 2, 31);
  PipelineConfig cfg;
  const auto a = solve_pipeline(inst, cfg), b = solve_pipeline(inst, cfg);
  ASSERT_TRUE(a.solution && b.solution);
  EXPECT_EQ(solution_json(*a.solution, inst.graph, inst.terminals).dump(),
            solution_json(*b.solution, inst.graph, inst.terminals).dump());
}

TEST(Pipeline, ExternalLpIsReplayed) {
  const auto inst = diamond();
  const auto s = solve_lp(inst);
  const auto dump = lp_solution_json(s.model, s.lp).dump();
  PipelineConfig cfg;
  cfg.lp_override = [&](const LpModel& m) { return std::optional<LpSolution>(parse_lp_solution(dump, m)); };
  EXPECT_EQ(solve_pipeline(inst, cfg).status, PipelineStatus::kFeasible);

  // An all-zero point violates the rows and must be refused.
  cfg.lp_override = [](const LpModel& m) {
    LpSolution bad;
    bad.status = SolveStatus::kOptimal;
    bad.values.assign(m.num_vars(), 0.0);
    return std::optional<LpSolution>(bad);
  };
  EXPECT_THROW(solve_pipeline(inst, cfg), ModelError);
}

TEST(Pipeline, PruneNeverCostsMore) {
  const auto inst = planted(6, 16, 2, 41);
  PipelineConfig cfg;
  const auto raw = solve_pipeline(inst, cfg);
  cfg.rounding.prune_result = true;
  const auto pruned = solve_pipeline(inst, cfg);
  ASSERT_TRUE(raw.feasible() && pruned.feasible());
  EXPECT_LE(pruned.solution->cost, raw.solution->cost);
  EXPECT_TRUE(pruned.solution->pruned);
}

TEST(Bench, CsvHasOneRowPerInstance) {
  const auto dir = std::filesystem::temp_directory_path() / "dst2_bench_unit";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_file((dir / "a.txt").string(), instance_text(diamond()));
  write_file((dir / "b.txt").string(), instance_text(single_path()));
  write_file((dir / "c.txt").string(), "garbage\n");
  write_file((dir / "ignored.md").string(), "x");
  const auto rows = run_bench(dir, PipelineConfig{});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].verdict, "feasible");
  ASSERT_TRUE(rows[0].ratio_vs_opt());
  EXPECT_DOUBLE_EQ(*rows[0].ratio_vs_opt(), 1.0);
  EXPECT_EQ(rows[1].verdict, "infeasible");
  EXPECT_EQ(rows[2].verdict, "error");
  const auto header = bench_csv_header();
  EXPECT_EQ(header.rfind("version,", 0), 0u);
  const auto row = bench_csv_row(rows[0]);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_EQ(row.rfind(kBenchVersion, 0), 0u);
  std::filesystem::remove_all(dir);
}

}  // namespace
