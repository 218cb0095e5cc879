#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dst2/max_flow.hpp"
#include "dst2/solution.hpp"
#include "dst2/verify.hpp"

namespace dst2 {

/// A 2-DST solver as seen by the reductions. An infeasible instance is
/// reported through a solution whose report is not feasible.
using DstSolver = std::function<SolutionSubgraph(const DstInstance&)>;

/// Pairwise survivable instance: every ordered terminal pair needs two
/// edge-disjoint paths.
struct DssInstance {
  DirectedMultigraph graph;
  std::vector<VertexId> terminals;

  void validate() const {
    if (terminals.size() < 2) throw ArgumentError("DSS instance needs at least two terminals");
    auto sorted = terminals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ArgumentError("duplicate terminal");
    for (VertexId t : terminals) graph.check_vertex(t);
  }
};

struct PairwiseReport {
  bool feasible = true;
  int min_flow = 0;
  std::optional<std::pair<VertexId, VertexId>> witness;  // first failing ordered pair
};

/// Two edge-disjoint s->t paths inside `edges` for every ordered pair of
/// distinct terminals.
inline PairwiseReport verify_pairwise(const DirectedMultigraph& g, std::span<const EdgeId> edges,
                                      std::span<const VertexId> terminals) {
  const auto mask = detail::edge_mask(g, edges);
  PairwiseReport rep;
  rep.min_flow = std::numeric_limits<int>::max();
  for (VertexId s : terminals)
    for (VertexId t : terminals) {
      if (s == t) continue;
      const int f = max_flow_unit_masked(g, mask, s, t, 2).value;
      rep.min_flow = std::min(rep.min_flow, f);
      if (f < 2 && rep.feasible) {
        rep.feasible = false;
        rep.witness = std::make_pair(s, t);
      }
    }
  return rep;
}

struct DssResult {
  bool feasible = false;
  VertexId root = 0;
  SolutionSubgraph solution;  // union, in the DSS graph
  SolutionSubgraph out_solution;
  SolutionSubgraph in_solution;  // edge ids of the DSS graph (reversed back)
  PairwiseReport pairwise;
};

// Out-rooted and in-rooted (on the reversed graph) 2-DST instances of a
// DSS instance rooted at its smallest terminal.
inline std::pair<DstInstance, DstInstance> rooted_instances(const DssInstance& inst) {
  inst.validate();
  const VertexId r = *std::min_element(inst.terminals.begin(), inst.terminals.end());
  DstInstance out{inst.graph, r, {}};
  for (VertexId t : inst.terminals)
    if (t != r) out.terminals.push_back(t);
  std::sort(out.terminals.begin(), out.terminals.end());
  DstInstance in{inst.graph.reversed(), r, out.terminals};
  return {std::move(out), std::move(in)};
}

/// 2-DSS through two rooted 2-DST solves and the union of their edges.
/// Edge connectivity is transitive, so two disjoint paths to and from the
/// root for every terminal give two between every pair.
inline DssResult dss_via_dst(const DssInstance& inst, const DstSolver& solver) {
  auto [out_inst, in_inst] = rooted_instances(inst);
  DssResult res;
  res.root = out_inst.root;
  res.out_solution = solver(out_inst);
  res.in_solution = solver(in_inst);  // reversed graph keeps edge ids
  if (!res.out_solution.verified_feasible() || !res.in_solution.verified_feasible()) return res;
  std::vector<EdgeId> all = res.out_solution.edges;
  all.insert(all.end(), res.in_solution.edges.begin(), res.in_solution.edges.end());
  res.solution = SolutionSubgraph::from_edges(inst.graph, all);
  res.pairwise = verify_pairwise(inst.graph, res.solution.edges, inst.terminals);
  if (!res.pairwise.feasible) {
    const auto [s, t] = *res.pairwise.witness;
    throw ModelError("DSS union fails pairwise check for " + inst.graph.name(s) + " -> " + inst.graph.name(t));
  }
  res.feasible = true;
  return res;
}

/// Vertex v becomes v_in = 2v and v_out = 2v+1. Original edge e keeps id e
/// and runs tail_out -> head_in; the zero-cost edge v_in -> v_out has id
/// m + v.
struct SplitMap {
  VertexId num_original_vertices = 0;
  EdgeId num_original_edges = 0;

  VertexId in(VertexId v) const { return 2 * v; }
  VertexId out(VertexId v) const { return 2 * v + 1; }
  EdgeId split_edge(EdgeId e) const { return e; }
  EdgeId internal_edge(VertexId v) const { return num_original_edges + v; }
  bool is_internal(EdgeId e) const { return e >= num_original_edges; }
  VertexId original_vertex(VertexId split) const { return split / 2; }
  std::optional<EdgeId> original_edge(EdgeId split) const {
    if (is_internal(split)) return std::nullopt;
    return split;
  }

  // Original-graph edges of a split-graph edge set, internal edges dropped.
  std::vector<EdgeId> map_back(std::span<const EdgeId> split_edges) const {
    std::vector<EdgeId> out;
    for (EdgeId e : split_edges)
      if (!is_internal(e)) out.push_back(e);
    return normalized_edge_set(out);
  }

  // Split-graph edges of an original edge set plus every internal edge.
  std::vector<EdgeId> lift(std::span<const EdgeId> edges) const {
    std::vector<EdgeId> out(edges.begin(), edges.end());
    for (VertexId v = 0; v < num_original_vertices; ++v) out.push_back(internal_edge(v));
    return normalized_edge_set(out);
  }
};

struct SplitGraph {
  DirectedMultigraph graph;
  SplitMap map;
};

inline SplitGraph vertex_split(const DirectedMultigraph& g) {
  SplitGraph s;
  s.map.num_original_vertices = g.num_vertices();
  s.map.num_original_edges = g.num_edges();
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    s.graph.add_vertex(g.name(v) + "_in");
    s.graph.add_vertex(g.name(v) + "_out");
  }
  for (const auto& e : g.edges()) s.graph.add_edge(s.map.out(e.tail), s.map.in(e.head), e.cost);
  for (VertexId v = 0; v < g.num_vertices(); ++v) s.graph.add_edge(s.map.in(v), s.map.out(v), 0.0);
  return s;
}

// Number of internally vertex-disjoint s->t paths inside `edges` (capped at
// `limit`), measured on the split graph.
inline int vertex_disjoint_paths(const DirectedMultigraph& g, std::span<const EdgeId> edges, VertexId s,
                                 VertexId t, int limit = 2) {
  const auto split = vertex_split(g);
  const auto lifted = split.map.lift(edges);
  return max_flow_unit_on(split.graph, lifted, split.map.out(s), split.map.in(t), limit).value;
}

struct VertexDstResult {
  bool feasible = false;
  SolutionSubgraph solution;        // in the original graph
  SolutionSubgraph split_solution;  // as returned by the solver
  std::vector<int> disjoint_paths;  // per terminal, capped at 2
};

/// Vertex-connectivity 2-DST: solve the edge version on the split graph
/// rooted at r_out with terminals t_in, then drop the internal edges.
inline VertexDstResult solve_vertex_2dst(const DstInstance& inst, const DstSolver& solver) {
  inst.validate();
  const auto split = vertex_split(inst.graph);
  DstInstance si{split.graph, split.map.out(inst.root), {}};
  for (VertexId t : inst.terminals) si.terminals.push_back(split.map.in(t));

  VertexDstResult res;
  // Preflight on the split graph: a shared cut vertex shows up as flow 1.
  for (VertexId t : si.terminals)
    if (max_flow_unit(si.graph, si.root, t).value < 2) return res;

  res.split_solution = solver(si);
  if (!res.split_solution.verified_feasible()) return res;
  res.solution = SolutionSubgraph::from_edges(inst.graph, split.map.map_back(res.split_solution.edges));
  res.feasible = true;
  for (VertexId t : inst.terminals) {
    res.disjoint_paths.push_back(vertex_disjoint_paths(inst.graph, res.solution.edges, inst.root, t));
    res.feasible = res.feasible && res.disjoint_paths.back() >= 2;
  }
  if (!res.feasible) throw ModelError("mapped vertex solution lost vertex-disjointness");
  res.solution.report = verify_2dst(inst, res.solution);
  return res;
}

namespace detail {

// Simple s->t paths in edge-id DFS order; throws SizeError past `cap`.
inline std::vector<std::vector<EdgeId>> simple_paths(const DirectedMultigraph& g, VertexId s, VertexId t,
                                                     std::size_t cap) {
  std::vector<std::vector<EdgeId>> out;
  std::vector<EdgeId> stack;
  std::vector<char> on(g.num_vertices(), 0);
  std::function<void(VertexId)> walk = [&](VertexId v) {
    if (v == t) {
      if (out.size() >= cap) throw SizeError("too many simple paths for exhaustive search", out.size() + 1, cap);
      out.push_back(stack);
      return;
    }
    on[v] = 1;
    for (EdgeId e : g.out_edges(v)) {
      const VertexId w = g.edge(e).head;
      if (on[w]) continue;
      stack.push_back(e);
      walk(w);
      stack.pop_back();
    }
    on[v] = 0;
  };
  walk(s);
  return out;
}

}  // namespace detail

/// Cheapest pair of internally vertex-disjoint, edge-disjoint s->t paths by
/// exhaustive enumeration; nullopt when no such pair exists.
inline std::optional<std::vector<EdgeId>> min_cost_two_vertex_disjoint(const DirectedMultigraph& g, VertexId s,
                                                                       VertexId t,
                                                                       std::size_t path_cap = 100'000) {
  const auto paths = detail::simple_paths(g, s, t, path_cap);
  std::vector<std::vector<VertexId>> inner(paths.size());
  std::vector<double> cost(paths.size());
  for (std::size_t k = 0; k < paths.size(); ++k) {
    for (std::size_t i = 0; i + 1 < paths[k].size(); ++i) inner[k].push_back(g.edge(paths[k][i]).head);
    std::sort(inner[k].begin(), inner[k].end());
    cost[k] = g.cost_of(paths[k]);
  }
  std::optional<std::vector<EdgeId>> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < paths.size(); ++a)
    for (std::size_t b = a + 1; b < paths.size(); ++b) {
      if (cost[a] + cost[b] >= best_cost) continue;
      std::vector<VertexId> common;
      std::set_intersection(inner[a].begin(), inner[a].end(), inner[b].begin(), inner[b].end(),
                            std::back_inserter(common));
      if (!common.empty()) continue;
      // Two one-edge paths must be different parallel edges.
      if (paths[a].size() == 1 && paths[b].size() == 1 && paths[a][0] == paths[b][0]) continue;
      best_cost = cost[a] + cost[b];
      std::vector<EdgeId> both = paths[a];
      both.insert(both.end(), paths[b].begin(), paths[b].end());
      best = normalized_edge_set(both);
    }
  return best;
}

struct VertexDssResult {
  bool feasible = false;
  std::pair<VertexId, VertexId> gadget;  // the two terminals joined to the auxiliary root
  std::vector<EdgeId> pair_edges;        // min-cost 2-flows between the gadget vertices
  SolutionSubgraph solution;
  bool pairwise_vertex_ok = false;
};

/// Vertex-connectivity 2-DSS: pick the two smallest terminals as the gadget
/// R, buy cheapest two vertex-disjoint paths both ways between them, and
/// solve vertex 2-DST out of and into an auxiliary root joined to R for the
/// remaining terminals. The answer is the union of all three.
inline VertexDssResult vertex_dss_via_dst(const DssInstance& inst, const DstSolver& solver) {
  inst.validate();
  auto sorted = inst.terminals;
  std::sort(sorted.begin(), sorted.end());
  VertexDssResult res;
  res.gadget = {sorted[0], sorted[1]};
  const auto& g = inst.graph;
  const auto ab = min_cost_two_vertex_disjoint(g, sorted[0], sorted[1]);
  const auto ba = min_cost_two_vertex_disjoint(g, sorted[1], sorted[0]);
  if (!ab || !ba) return res;
  res.pair_edges = *ab;
  res.pair_edges.insert(res.pair_edges.end(), ba->begin(), ba->end());
  res.pair_edges = normalized_edge_set(res.pair_edges);

  std::vector<EdgeId> all = res.pair_edges;
  const std::vector<VertexId> rest(sorted.begin() + 2, sorted.end());
  if (!rest.empty()) {
    // Original edges keep their ids; the root gadget edges come last.
    auto with_root = [&](const DirectedMultigraph& base) {
      DstInstance d{base, 0, rest};
      d.root = d.graph.add_vertex("__root");
      d.graph.add_edge(d.root, sorted[0], 0.0);
      d.graph.add_edge(d.root, sorted[1], 0.0);
      return d;
    };
    for (const auto& d : {with_root(g), with_root(g.reversed())}) {
      const auto part = solve_vertex_2dst(d, solver);
      if (!part.feasible) return res;
      for (EdgeId e : part.solution.edges)
        if (e < g.num_edges()) all.push_back(e);
    }
  }
  res.solution = SolutionSubgraph::from_edges(g, all);
  res.pairwise_vertex_ok = true;
  for (VertexId s : inst.terminals)
    for (VertexId t : inst.terminals)
      if (s != t && vertex_disjoint_paths(g, res.solution.edges, s, t) < 2) res.pairwise_vertex_ok = false;
  res.feasible = res.pairwise_vertex_ok;
  return res;
}

}  // namespace dst2
