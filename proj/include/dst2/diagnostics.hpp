#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "dst2/lp_model.hpp"
#include "dst2/max_flow.hpp"
#include "dst2/rounding.hpp"
#include "dst2/shallow_tree.hpp"

namespace dst2 {

namespace detail {

inline void check_solution(const LpModel& model, const LpSolution& lp) {
  if (static_cast<long>(lp.values.size()) != model.num_vars()) throw ArgumentError("LP solution size mismatch");
}

// The shallow tree as a graph over its nodes plus one sink per group;
// tree edge k keeps id k and group arcs follow.
struct TreeNetwork {
  DirectedMultigraph graph;
  std::vector<VertexId> sinks;
  std::vector<std::vector<EdgeId>> group_arcs;

  explicit TreeNetwork(const ShallowTree& tree) : graph(tree.num_nodes()) {
    for (const auto& e : tree.edges()) graph.add_edge(e.parent_node, e.child_node, 0.0);
    for (int t = 0; t < tree.num_groups(); ++t) {
      sinks.push_back(graph.add_vertex("sink" + std::to_string(t)));
      group_arcs.emplace_back();
      for (int node : tree.group(t)) group_arcs.back().push_back(graph.add_edge(node, sinks.back(), 0.0));
    }
  }

  // Max flow to group t with tree capacities `caps`; group arcs are
  // unconstrained (their capacity is the total tree capacity).
  double flow_to_group(std::span<const double> caps, int t) const {
    std::vector<double> all(graph.num_edges(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < caps.size(); ++k) {
      all[k] = std::max(caps[k], 0.0);
      total += all[k];
    }
    for (EdgeId a : group_arcs[t]) all[a] = total;
    return max_flow_capacitated(graph, all, 0, sinks[t]).value;
  }
};

}  // namespace detail

// mu_t: group flow entering the nodes of group t.
inline double group_flow(const ShallowTree& tree, const LpModel& model, const LpSolution& lp, int t) {
  detail::check_solution(model, lp);
  double mu = 0.0;
  for (int node : tree.group(t)) mu += lp.values[model.index.fhat(t, tree.edge_into(node))];
  return mu;
}

/// Good/bad split of the tree edges against one graph edge e.
struct GoodEdgeAnalysis {
  EdgeId edge = -1;
  std::vector<int> bad;                // tree edges, ascending
  std::vector<double> reduced;         // xhat - f(., e), bad edges zeroed
  std::vector<double> residual_flow;   // per terminal, through good edges
  std::vector<double> mu;              // per terminal, full group flow
};

inline bool is_bad_edge(double xhat, double f, double beta) { return xhat - f < f / (2.0 * beta); }

inline GoodEdgeAnalysis good_edge_analysis(const ShallowTree& tree, const LpModel& model, const LpSolution& lp,
                                           double beta, EdgeId e) {
  detail::check_solution(model, lp);
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  if (e < 0 || e >= model.index.num_edges()) throw ArgumentError("unknown graph edge");
  const auto& vi = model.index;
  GoodEdgeAnalysis a;
  a.edge = e;
  a.reduced.resize(tree.num_edges());
  for (int te = 0; te < tree.num_edges(); ++te) {
    const double xh = lp.values[vi.xhat(te)];
    const double f = lp.values[vi.f(te, e)];
    if (is_bad_edge(xh, f, beta)) {
      a.bad.push_back(te);
      a.reduced[te] = 0.0;
    } else {
      a.reduced[te] = std::max(xh - f, 0.0);
    }
  }
  const detail::TreeNetwork net(tree);
  for (int t = 0; t < tree.num_groups(); ++t) {
    a.residual_flow.push_back(net.flow_to_group(a.reduced, t));
    a.mu.push_back(group_flow(tree, model, lp, t));
  }
  return a;
}

/// Max r->S_t flow in the tree without the edges bad against e, under
/// capacities xhat - f(., e).
inline double lemma4_check(const ShallowTree& tree, const LpModel& model, const LpSolution& lp, double beta,
                           EdgeId e, int t) {
  if (t < 0 || t >= tree.num_groups()) throw ArgumentError("unknown terminal index");
  return good_edge_analysis(tree, model, lp, beta, e).residual_flow[t];
}

/// max over (te, e, t) of (fhat^t - f^t) - (xhat - f). Without the div
/// rows there is nothing to compare, and the result is 0.
inline double inequality1_check(const ShallowTree& tree, const LpModel& model, const LpSolution& lp) {
  detail::check_solution(model, lp);
  if (model.count_rows(RowFamily::kDiv) == 0) return 0.0;
  const auto& vi = model.index;
  double worst = -std::numeric_limits<double>::infinity();
  for (int te = 0; te < tree.num_edges(); ++te) {
    const double xh = lp.values[vi.xhat(te)];
    for (int t = 0; t < vi.num_terminals(); ++t) {
      const double fh = lp.values[vi.fhat(t, te)];
      for (int e = 0; e < vi.num_edges(); ++e)
        worst = std::max(worst, (fh - lp.values[vi.ft(t, te, e)]) - (xh - lp.values[vi.f(te, e)]));
    }
  }
  return worst;
}

struct SurvivalEstimate {
  double probability = 0.0;
  double radius = 0.0;  // three binomial standard errors
  int trials = 0;
};

/// Fraction of single rounding iterations whose H_j has an r->t path
/// avoiding graph edge e. Trial k uses iteration stream k of the seed.
inline SurvivalEstimate survival_estimate(const DstInstance& inst, const ShallowTree& tree, const LpModel& model,
                                          const LpSolution& lp, const RoundingConfig& config, EdgeId e,
                                          VertexId t, int trials) {
  if (trials < 1) throw ArgumentError("trials must be >= 1");
  inst.graph.check_edge(e);
  if (inst.terminal_index(t) < 0) throw ArgumentError("vertex is not a terminal");
  const Rounder rounder(inst, tree, model, lp, config);
  int hits = 0;
  std::vector<char> mask(inst.graph.num_edges());
  for (int k = 0; k < trials; ++k) {
    std::fill(mask.begin(), mask.end(), 0);
    for (const auto& s : rounder.iteration(k)) mask[s.edge] = 1;
    mask[e] = 0;
    hits += max_flow_unit_masked(inst.graph, mask, inst.root, t, 1).value > 0;
  }
  SurvivalEstimate s;
  s.trials = trials;
  s.probability = static_cast<double>(hits) / trials;
  s.radius = 3.0 * std::sqrt(s.probability * (1.0 - s.probability) / trials);
  return s;
}

}  // namespace dst2
