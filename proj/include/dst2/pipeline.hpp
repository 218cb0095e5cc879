#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dst2/diagnostics.hpp"
#include "dst2/exact.hpp"
#include "dst2/io.hpp"
#include "dst2/lp_model.hpp"
#include "dst2/reductions.hpp"
#include "dst2/rounding.hpp"
#include "dst2/shallow_tree.hpp"

namespace dst2 {

struct PipelineConfig {
  int depth = 2;
  double beta_multiplier = 1.0;
  int beta_retries = 4;  // beta doublings tried after an infeasible LP
  bool prune_unreachable = true;
  bool tidy_flows = true;
  std::size_t max_tree_nodes = 200'000;
  std::size_t max_lp_nonzeros = 5'000'000;
  SolverConfig solver;
  RoundingConfig rounding{.iteration_multiplier = 2.0};
  // Replaces the internal LP solve, e.g. with a third-party solution.
  std::function<std::optional<LpSolution>(const LpModel&)> lp_override;
};

enum class PipelineStatus { kFeasible, kUnverified, kInfeasibleInstance, kLpInfeasible, kLpLimit, kSizeCapped };

inline const char* pipeline_status_name(PipelineStatus s) {
  switch (s) {
    case PipelineStatus::kFeasible:
      return "feasible";
    case PipelineStatus::kUnverified:
      return "unverified";
    case PipelineStatus::kInfeasibleInstance:
      return "infeasible";
    case PipelineStatus::kLpInfeasible:
      return "lp-infeasible";
    case PipelineStatus::kLpLimit:
      return "lp-limit";
    case PipelineStatus::kSizeCapped:
      return "size-capped";
  }
  return "?";
}

struct StageTimes {
  double tree = 0.0;
  double lp = 0.0;
  double round = 0.0;
};

struct PipelineResult {
  PipelineStatus status = PipelineStatus::kInfeasibleInstance;
  std::string message;
  double beta = 0.0;
  int beta_attempts = 0;
  int iterations = 0;  // J actually used
  int samples = 0;     // L actually used
  TreeStats tree;
  double lp_value = 0.0;  // certified lower bound when the LP is optimal
  long lp_iterations = 0;
  std::optional<SolutionSubgraph> solution;
  StageTimes times;

  bool feasible() const { return status == PipelineStatus::kFeasible; }
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Terminals whose full-graph max flow from the root is below 2.
inline std::vector<VertexId> preflight(const DstInstance& inst) {
  std::vector<VertexId> bad;
  for (VertexId t : inst.terminals)
    if (max_flow_unit(inst.graph, inst.root, t).value < 2) bad.push_back(t);
  return bad;
}

/// Tree, LP (with beta doubling on infeasibility), rounding, verification.
inline PipelineResult solve_pipeline(const DstInstance& inst, const PipelineConfig& cfg) {
  inst.validate();
  cfg.rounding.validate();
  cfg.solver.validate();
  PipelineResult res;
  if (const auto bad = preflight(inst); !bad.empty()) {
    res.message = "terminal " + inst.graph.name(bad.front()) + " has fewer than two edge-disjoint paths from the root";
    return res;
  }

  detail::Stopwatch sw;
  ShallowTree tree;
  try {
    tree = build_shallow_tree(inst, {cfg.depth, cfg.prune_unreachable, cfg.max_tree_nodes});
  } catch (const SizeError& e) {
    res.status = PipelineStatus::kSizeCapped;
    res.message = std::string(e.what()) + ": " + std::to_string(e.projected()) + " > " + std::to_string(e.cap());
    return res;
  }
  res.tree = tree_stats(tree);
  res.times.tree = sw.seconds();

  detail::Stopwatch lp_sw;
  res.beta = congestion_parameter(cfg.depth, inst.num_terminals(), cfg.beta_multiplier);
  std::optional<LpModel> model;
  LpSolution lp;
  const double base_beta = res.beta;
  for (int attempt = 0; attempt <= cfg.beta_retries; ++attempt) {
    res.beta_attempts = attempt + 1;
    res.beta = base_beta * std::ldexp(1.0, attempt);
    try {
      model = build_lp(inst, tree, res.beta, {cfg.max_lp_nonzeros, true});
    } catch (const SizeError& e) {
      res.status = PipelineStatus::kSizeCapped;
      res.message = std::string(e.what()) + ": " + std::to_string(e.projected()) + " > " + std::to_string(e.cap());
      return res;
    }
    std::optional<LpSolution> given;
    if (cfg.lp_override) given = cfg.lp_override(*model);
    if (given) {
      lp = std::move(*given);
      if (lp.optimal()) {
        const auto rep = replay_constraints(*model, lp.values);
        if (!rep.ok(1e-6))
          throw ModelError("external LP solution violates a " + std::string(family_name(rep.worst_family)) +
                           " row by " + std::to_string(rep.max_violation));
      }
    } else {
      lp = solve_model(*model, cfg.solver);
      res.lp_iterations += lp.iterations;
      if (lp.optimal() && cfg.tidy_flows) {
        const long before = lp.iterations;
        lp = tidy_flows(*model, lp, cfg.solver);
        res.lp_iterations += lp.iterations - before;
      }
    }
    if (lp.status != SolveStatus::kInfeasible || given) break;
  }
  res.times.lp = lp_sw.seconds();
  if (lp.status == SolveStatus::kInfeasible) {
    res.status = PipelineStatus::kLpInfeasible;
    res.message = "LP infeasible up to beta = " + std::to_string(res.beta);
    return res;
  }
  if (!lp.optimal()) {
    res.status = PipelineStatus::kLpLimit;
    res.message = std::string("LP solve ended with status ") + status_name(lp.status);
    return res;
  }
  res.lp_value = lp.objective;

  detail::Stopwatch round_sw;
  const Rounder rounder(inst, tree, *model, lp, cfg.rounding);
  res.iterations = rounder.iterations();
  res.samples = rounder.samples();
  auto sol = rounder.run();
  sol.report = verify_2dst(inst, sol);
  if (cfg.rounding.prune_result && sol.report->feasible) {
    sol = reverse_delete(inst, std::move(sol));
    sol.report = verify_2dst(inst, sol);
  }
  res.times.round = round_sw.seconds();
  res.status = sol.report->feasible ? PipelineStatus::kFeasible : PipelineStatus::kUnverified;
  res.solution = std::move(sol);
  return res;
}

// Pipeline as a solver for the reductions; failures come back as an
// unverified empty solution.
inline DstSolver pipeline_solver(PipelineConfig cfg) {
  return [cfg](const DstInstance& inst) {
    auto r = solve_pipeline(inst, cfg);
    if (r.solution) return *r.solution;
    SolutionSubgraph empty;
    empty.report = FeasibilityReport{};
    return empty;
  };
}

// Exact oracle as a solver for the reductions.
inline DstSolver exact_solver(ExactConfig cfg = {}) {
  return [cfg](const DstInstance& inst) {
    const auto r = exact_2dst(inst, cfg);
    auto s = SolutionSubgraph::from_edges(inst.graph, r.edges);
    s.report = r.status == ExactStatus::kInfeasible ? FeasibilityReport{} : verify_2dst(inst, s);
    return s;
  };
}

inline Json pipeline_report_json(const DstInstance& inst, const PipelineResult& r, const PipelineConfig& cfg) {
  Json j;
  j["status"] = pipeline_status_name(r.status);
  if (!r.message.empty()) j["message"] = r.message;
  j["config"] = {{"depth", cfg.depth},
                 {"seed", cfg.rounding.seed},
                 {"beta_multiplier", cfg.beta_multiplier},
                 {"beta", r.beta},
                 {"beta_attempts", r.beta_attempts},
                 {"iterations", r.iterations},
                 {"samples", r.samples},
                 {"iteration_multiplier", cfg.rounding.iteration_multiplier},
                 {"prune", cfg.rounding.prune_result}};
  j["tree"] = {{"nodes", r.tree.nodes}, {"edges", r.tree.edges}, {"group_sizes", r.tree.group_sizes}};
  if (r.status != PipelineStatus::kInfeasibleInstance && r.status != PipelineStatus::kSizeCapped) {
    j["lp_lower_bound"] = r.lp_value;
    j["lp_iterations"] = r.lp_iterations;
  }
  if (r.solution) {
    j["cost"] = r.solution->cost;
    j["ratio_vs_lp"] = r.lp_value > 0.0 ? Json(r.solution->cost / r.lp_value) : Json(nullptr);
    j["postprocessed"] = r.solution->pruned ? "reverse-delete" : "none";
    j["report"] = report_json(*r.solution->report, inst.graph, inst.terminals);
  }
  return j;
}

/// One row of the benchmark CSV.
struct BenchRecord {
  std::string instance;
  int n = 0, m = 0, h = 0, depth = 0;
  std::optional<double> lp_value;
  std::optional<double> cost;
  std::optional<double> opt;
  std::string verdict;
  double t_tree = 0.0, t_lp = 0.0, t_round = 0.0, t_exact = 0.0;
  std::uint64_t seed = 0;
  std::string error;

  std::optional<double> ratio_vs_lp() const {
    if (!cost || !lp_value || *lp_value <= 0.0) return std::nullopt;
    return *cost / *lp_value;
  }
  std::optional<double> ratio_vs_opt() const {
    if (!cost || !opt || *opt <= 0.0) return std::nullopt;
    return *cost / *opt;
  }
};

inline constexpr const char* kBenchVersion = "dst2-bench-1";

inline std::string bench_csv_header() {
  return "version,instance,n,m,h,D,lp_value,cost,opt,ratio_lp,ratio_opt,verdict,t_tree,t_lp,t_round,t_exact,seed,"
         "error\n";
}

inline std::string bench_csv_row(const BenchRecord& r) {
  auto num = [](std::optional<double> v) {
    if (!v) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return std::string(buf);
  };
  auto secs = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return std::string(buf);
  };
  std::string err = r.error;
  std::replace(err.begin(), err.end(), ',', ';');
  std::replace(err.begin(), err.end(), '\n', ' ');
  std::ostringstream ss;
  ss << kBenchVersion << ',' << r.instance << ',' << r.n << ',' << r.m << ',' << r.h << ',' << r.depth << ','
     << num(r.lp_value) << ',' << num(r.cost) << ',' << num(r.opt) << ',' << num(r.ratio_vs_lp()) << ','
     << num(r.ratio_vs_opt()) << ',' << r.verdict << ',' << secs(r.t_tree) << ',' << secs(r.t_lp) << ','
     << secs(r.t_round) << ',' << secs(r.t_exact) << ',' << r.seed << ',' << err << '\n';
  return ss.str();
}

/// Solves one instance and, when it fits the cap, its exact optimum.
inline BenchRecord bench_instance(const std::string& id, const DstInstance& inst, const PipelineConfig& cfg,
                                  const ExactConfig& exact) {
  BenchRecord rec;
  rec.instance = id;
  rec.n = inst.graph.num_vertices();
  rec.m = inst.graph.num_edges();
  rec.h = inst.num_terminals();
  rec.depth = cfg.depth;
  rec.seed = cfg.rounding.seed;
  try {
    const auto r = solve_pipeline(inst, cfg);
    rec.verdict = pipeline_status_name(r.status);
    rec.t_tree = r.times.tree;
    rec.t_lp = r.times.lp;
    rec.t_round = r.times.round;
    if (r.solution) {
      rec.lp_value = r.lp_value;
      rec.cost = r.solution->cost;
    }
    if (rec.m <= exact.max_edges) {
      detail::Stopwatch sw;
      const auto ex = exact_2dst(inst, exact);
      rec.t_exact = sw.seconds();
      if (ex.optimal()) rec.opt = ex.cost;
    }
  } catch (const std::exception& e) {
    rec.verdict = "error";
    rec.error = e.what();
  }
  return rec;
}

inline bool is_instance_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".json" || ext == ".txt" || ext == ".dst";
}

/// Every instance file of `dir` in name order; unreadable files become
/// error rows.
inline std::vector<BenchRecord> run_bench(const std::filesystem::path& dir, const PipelineConfig& cfg,
                                          const ExactConfig& exact = {}) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && is_instance_file(entry.path())) files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<BenchRecord> out;
  for (const auto& f : files) {
    const auto id = f.filename().string();
    try {
      out.push_back(bench_instance(id, load_instance(f.string()), cfg, exact));
    } catch (const std::exception& e) {
      BenchRecord rec;
      rec.instance = id;
      rec.depth = cfg.depth;
      rec.seed = cfg.rounding.seed;
      rec.verdict = "error";
      rec.error = e.what();
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace dst2
