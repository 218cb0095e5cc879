// Command-line front end: solve, exact, verify, reduce, export, bench, generate.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dst2/dst2.hpp"

namespace {

using namespace dst2;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kInfeasible = 3,
  kSizeCap = 4,
  kUnverified = 5,
  kLpFailure = 6,
  kInternal = 7,
};

struct RunConfig {
  std::string instance;
  std::string out;
  std::string report;
  std::string lp_solution;
  int depth = 2;
  std::uint64_t seed = 1;
  double beta_mult = 1.0;
  int iters = 0;
  int samples = 0;
  double iter_mult = 2.0;
  bool prune = false;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, RunConfig& rc) {
  cmd->add_option("--depth", rc.depth, "shallow tree depth D")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", rc.seed, "random seed");
  cmd->add_option("--beta-mult", rc.beta_mult, "multiplier on the congestion parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", rc.iters, "outer iterations J (0 = default)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--samples", rc.samples, "paths per marked tree edge L (0 = default)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--iter-mult", rc.iter_mult, "multiplier on the default J")->check(CLI::PositiveNumber);
  cmd->add_flag("--prune", rc.prune, "reverse-delete post-processing");
  cmd->add_option("--out", rc.out, "output path");
}

PipelineConfig pipeline_config(const RunConfig& rc) {
  PipelineConfig cfg;
  cfg.depth = rc.depth;
  cfg.beta_multiplier = rc.beta_mult;
  cfg.rounding.seed = rc.seed;
  cfg.rounding.iterations = rc.iters;
  cfg.rounding.samples = rc.samples;
  cfg.rounding.iteration_multiplier = rc.iter_mult;
  cfg.rounding.prune_result = rc.prune;
  if (!rc.lp_solution.empty()) {
    const auto text = read_file(rc.lp_solution);
    cfg.lp_override = [text](const LpModel& model) { return std::optional<LpSolution>(parse_lp_solution(text, model)); };
  }
  return cfg;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_file(path, text);
}

int exit_for(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::kFeasible:
      return kOk;
    case PipelineStatus::kUnverified:
      return kUnverified;
    case PipelineStatus::kInfeasibleInstance:
      return kInfeasible;
    case PipelineStatus::kSizeCapped:
      return kSizeCap;
    case PipelineStatus::kLpInfeasible:
    case PipelineStatus::kLpLimit:
      return kLpFailure;
  }
  return kInternal;
}

int cmd_solve(const RunConfig& rc) {
  const auto inst = load_instance(rc.instance);
  const auto cfg = pipeline_config(rc);
  const auto r = solve_pipeline(inst, cfg);
  if (rc.verbosity > 0)
    std::cerr << "tree " << r.tree.nodes << " nodes, beta " << r.beta << ", LP " << r.lp_value << " in "
              << r.lp_iterations << " pivots, times " << r.times.tree << "/" << r.times.lp << "/" << r.times.round
              << " s\n";
  const auto report = pipeline_report_json(inst, r, cfg).dump(2) + "\n";
  if (rc.report.empty())
    std::cout << report;
  else
    write_file(rc.report, report);
  if (r.status == PipelineStatus::kInfeasibleInstance) std::cerr << "infeasible: " << r.message << "\n";
  if (r.solution && r.feasible() && !rc.out.empty()) {
    auto j = solution_json(*r.solution, inst.graph, inst.terminals);
    j["config"] = {{"seed", rc.seed}, {"iterations", r.iterations}, {"samples", r.samples}, {"beta", r.beta},
                   {"depth", rc.depth}};
    j["lp_lower_bound"] = r.lp_value;
    write_file(rc.out, j.dump(2) + "\n");
  }
  return exit_for(r.status);
}

int cmd_exact(const RunConfig& rc, const ExactConfig& ec) {
  const auto inst = load_instance(rc.instance);
  const auto r = exact_2dst(inst, ec);
  if (r.status == ExactStatus::kInfeasible) {
    std::cout << "infeasible\n";
    return kInfeasible;
  }
  std::cout << r.cost << "\n";
  if (r.status == ExactStatus::kTimeout) std::cerr << "time budget exhausted; cost is an upper bound\n";
  if (!rc.out.empty()) {
    auto sol = SolutionSubgraph::from_edges(inst.graph, r.edges);
    sol.report = verify_2dst(inst, sol);
    auto j = solution_json(sol, inst.graph, inst.terminals);
    j["status"] = exact_status_name(r.status);
    write_file(rc.out, j.dump(2) + "\n");
  }
  return r.optimal() ? kOk : kUnverified;
}

int cmd_verify(const RunConfig& rc, const std::string& solution_path, bool scan) {
  const auto inst = load_instance(rc.instance);
  const auto sol = parse_solution(read_file(solution_path), inst.graph);
  const auto rep = verify_2dst(inst, sol);
  auto j = report_json(rep, inst.graph, inst.terminals);
  j["cost"] = sol.cost;
  if (scan) {
    j["menger_failures"] = Json::array();
    for (const auto& [e, t] : menger_scan(inst, sol.edges))
      j["menger_failures"].push_back({{"edge", e}, {"terminal", inst.graph.name(t)}});
  }
  emit(rc.out, j.dump(2) + "\n");
  return rep.feasible ? kOk : kUnverified;
}

int cmd_reduce(const RunConfig& rc, const std::string& mode, bool use_exact) {
  const auto cfg = pipeline_config(rc);
  const DstSolver solver = use_exact ? exact_solver() : pipeline_solver(cfg);
  const std::filesystem::path dir = rc.out.empty() ? std::filesystem::path(".") : std::filesystem::path(rc.out);
  if (mode == "dss") {
    const auto inst = load_dss_instance(rc.instance);
    const auto [out_inst, in_inst] = rooted_instances(inst);
    std::filesystem::create_directories(dir);
    write_file((dir / "out_rooted.json").string(), instance_json(out_inst).dump(2) + "\n");
    write_file((dir / "in_rooted.json").string(), instance_json(in_inst).dump(2) + "\n");
    const auto r = dss_via_dst(inst, solver);
    Json j;
    j["root"] = inst.graph.name(r.root);
    j["feasible"] = r.feasible;
    j["out_cost"] = r.out_solution.cost;
    j["in_cost"] = r.in_solution.cost;
    if (r.feasible) {
      j["cost"] = r.solution.cost;
      j["min_pair_flow"] = r.pairwise.min_flow;
      write_file((dir / "merged_solution.json").string(), solution_json(r.solution, inst.graph).dump(2) + "\n");
    }
    std::cout << j.dump(2) << "\n";
    return r.feasible ? kOk : kInfeasible;
  }
  if (mode == "vertex") {
    const auto inst = load_instance(rc.instance);
    const auto r = solve_vertex_2dst(inst, solver);
    Json j{{"feasible", r.feasible}};
    if (r.feasible) {
      j["cost"] = r.solution.cost;
      j["disjoint_paths"] = r.disjoint_paths;
      std::filesystem::create_directories(dir);
      write_file((dir / "vertex_solution.json").string(),
                 solution_json(r.solution, inst.graph, inst.terminals).dump(2) + "\n");
    }
    std::cout << j.dump(2) << "\n";
    return r.feasible ? kOk : kInfeasible;
  }
  if (mode == "vertex-dss") {
    const auto inst = load_dss_instance(rc.instance);
    const auto r = vertex_dss_via_dst(inst, solver);
    Json j{{"feasible", r.feasible},
           {"gadget", {inst.graph.name(r.gadget.first), inst.graph.name(r.gadget.second)}}};
    if (r.feasible) {
      j["cost"] = r.solution.cost;
      std::filesystem::create_directories(dir);
      write_file((dir / "vertex_dss_solution.json").string(), solution_json(r.solution, inst.graph).dump(2) + "\n");
    }
    std::cout << j.dump(2) << "\n";
    return r.feasible ? kOk : kInfeasible;
  }
  throw ArgumentError("unknown reduction '" + mode + "'");
}

int cmd_export(const RunConfig& rc, const std::string& tree_path, const std::string& solution_json_path) {
  const auto inst = load_instance(rc.instance);
  const auto tree = build_shallow_tree(inst, {rc.depth, true, ShallowTreeConfig{}.max_nodes});
  if (!tree_path.empty()) {
    std::ofstream os(tree_path);
    if (!os) throw std::runtime_error("cannot write '" + tree_path + "'");
    dump_tree(os, tree, inst.graph);
  }
  const auto model = build_lp(inst, tree, congestion_parameter(rc.depth, inst.num_terminals(), rc.beta_mult));
  emit(rc.out, export_lp(model));
  if (!solution_json_path.empty()) {
    const auto sol = tidy_flows(model, solve_model(model));
    write_file(solution_json_path, lp_solution_json(model, sol).dump(2) + "\n");
    if (!sol.optimal()) return kLpFailure;
  }
  return kOk;
}

int cmd_bench(const RunConfig& rc, const std::string& dir, const ExactConfig& ec) {
  const auto rows = run_bench(dir, pipeline_config(rc), ec);
  std::string csv = bench_csv_header();
  for (const auto& r : rows) csv += bench_csv_row(r);
  emit(rc.out, csv);
  return kOk;
}

int cmd_generate(const RunConfig& rc, const RandomInstanceSpec& spec, const std::string& format) {
  const auto inst = random_instance(spec);
  emit(rc.out, format == "text" ? instance_text(inst) : instance_json(inst).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximation and exact solvers for 2-connected directed Steiner tree"};
  app.set_config("--config", "", "TOML/INI file with option defaults; flags override it");
  app.require_subcommand(1);
  RunConfig rc;
  app.add_flag("-v,--verbose", rc.verbosity, "diagnostics on stderr");

  auto* solve = app.add_subcommand("solve", "LP rounding pipeline with verification");
  solve->add_option("instance", rc.instance)->required()->check(CLI::ExistingFile);
  add_common(solve, rc);
  solve->add_option("--report", rc.report, "write the JSON report here instead of stdout");
  solve->add_option("--lp-solution", rc.lp_solution, "use this LP solution dump instead of solving")
      ->check(CLI::ExistingFile);

  ExactConfig ec;
  auto* exact = app.add_subcommand("exact", "exact optimum by branch and bound");
  exact->add_option("instance", rc.instance)->required()->check(CLI::ExistingFile);
  exact->add_option("--max-edges", ec.max_edges, "edge cap")->check(CLI::PositiveNumber);
  exact->add_option("--time-budget", ec.time_budget_seconds, "seconds, 0 = unlimited");
  exact->add_option("--out", rc.out, "solution JSON");

  std::string solution_path;
  bool scan = false;
  auto* verify = app.add_subcommand("verify", "check two edge-disjoint paths per terminal");
  verify->add_option("instance", rc.instance)->required()->check(CLI::ExistingFile);
  verify->add_option("solution", solution_path)->required()->check(CLI::ExistingFile);
  verify->add_flag("--scan", scan, "list every (edge, terminal) Menger failure");
  verify->add_option("--out", rc.out, "report path");

  std::string mode;
  bool use_exact = false;
  auto* reduce = app.add_subcommand("reduce", "pairwise and vertex-connectivity reductions");
  reduce->add_option("mode", mode, "dss | vertex | vertex-dss")
      ->required()
      ->check(CLI::IsMember({"dss", "vertex", "vertex-dss"}));
  reduce->add_option("instance", rc.instance)->required()->check(CLI::ExistingFile);
  add_common(reduce, rc);
  reduce->add_flag("--exact", use_exact, "solve sub-instances exactly");

  std::string tree_path, lp_json;
  auto* exp = app.add_subcommand("export", "write the LP in CPLEX LP format");
  exp->add_option("instance", rc.instance)->required()->check(CLI::ExistingFile);
  exp->add_option("--depth", rc.depth)->check(CLI::PositiveNumber);
  exp->add_option("--beta-mult", rc.beta_mult)->check(CLI::PositiveNumber);
  exp->add_option("--out", rc.out, "LP file");
  exp->add_option("--tree", tree_path, "also dump the shallow tree");
  exp->add_option("--solution-json", lp_json, "also solve and dump the LP solution");

  std::string bench_dir;
  auto* bench = app.add_subcommand("bench", "run a directory of instances into CSV");
  bench->add_option("dir", bench_dir)->required()->check(CLI::ExistingDirectory);
  add_common(bench, rc);
  bench->add_option("--exact-cap", ec.max_edges, "largest m solved exactly")->check(CLI::PositiveNumber);

  RandomInstanceSpec spec;
  std::string format = "json";
  bool no_plant = false;
  auto* gen = app.add_subcommand("generate", "random instance");
  gen->add_option("-n,--vertices", spec.n)->required();
  gen->add_option("-m,--edges", spec.m)->required();
  gen->add_option("--terminals", spec.h, "number of terminals h")->required();
  gen->add_option("--seed", spec.seed);
  gen->add_option("--cost-min", spec.cost_min);
  gen->add_option("--cost-max", spec.cost_max);
  gen->add_flag("--no-plant", no_plant, "skip the planted feasible paths");
  gen->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  gen->add_option("--out", rc.out);

  CLI11_PARSE(app, argc, argv);
  spec.guarantee_feasible = !no_plant;

  try {
    if (*solve) return cmd_solve(rc);
    if (*exact) return cmd_exact(rc, ec);
    if (*verify) return cmd_verify(rc, solution_path, scan);
    if (*reduce) return cmd_reduce(rc, mode, use_exact);
    if (*exp) return cmd_export(rc, tree_path, lp_json);
    if (*bench) return cmd_bench(rc, bench_dir, ec);
    if (*gen) return cmd_generate(rc, spec, format);
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kUsage;
  } catch (const ArgumentError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return kUsage;
  } catch (const SizeError& e) {
    std::cerr << "size cap: " << e.what() << " (" << e.projected() << " > " << e.cap() << ")\n";
    return kSizeCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
