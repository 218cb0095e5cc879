#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dst2/max_flow.hpp"
#include "dst2/solution.hpp"

namespace dst2 {

namespace detail {

inline std::vector<char> edge_mask(const DirectedMultigraph& g, std::span<const EdgeId> edges) {
  std::vector<char> mask(g.num_edges(), 0);
  for (EdgeId e : edges) {
    g.check_edge(e);
    mask[e] = 1;
  }
  return mask;
}

}  // namespace detail

/// Every (e, t) with e in `edges` such that removing e leaves no r->t path.
/// By Menger this is empty exactly when each terminal has two
/// edge-disjoint paths, given that each terminal is reachable at all.
inline std::vector<std::pair<EdgeId, VertexId>> menger_scan(const DstInstance& inst,
                                                            std::span<const EdgeId> edges) {
  auto mask = detail::edge_mask(inst.graph, edges);
  std::vector<std::pair<EdgeId, VertexId>> failures;
  for (EdgeId e : normalized_edge_set(edges)) {
    mask[e] = 0;
    for (VertexId t : inst.terminals)
      if (max_flow_unit_masked(inst.graph, mask, inst.root, t, 1).value == 0) failures.emplace_back(e, t);
    mask[e] = 1;
  }
  return failures;
}

/// Feasible iff the edge set carries two edge-disjoint r->t paths for every
/// terminal. On failure the witness names an edge whose removal cuts the
/// first failing terminal off, with the cut found after removing it.
inline FeasibilityReport verify_2dst(const DstInstance& inst, std::span<const EdgeId> edges) {
  inst.validate();
  auto mask = detail::edge_mask(inst.graph, edges);
  FeasibilityReport rep;
  rep.feasible = true;
  for (VertexId t : inst.terminals) {
    const auto flow = max_flow_unit_masked(inst.graph, mask, inst.root, t);
    rep.flows.push_back(flow.value);
    if (flow.value >= 2 || !rep.feasible) {
      rep.feasible = rep.feasible && flow.value >= 2;
      continue;
    }
    rep.feasible = false;
    FeasibilityWitness w;
    w.terminal = t;
    if (flow.value == 0) {
      w.cut = flow.cut;
    } else {
      // A single edge carries every r->t path; it is the min cut.
      w.edge = flow.cut.front();
      mask[w.edge] = 0;
      w.cut = max_flow_unit_masked(inst.graph, mask, inst.root, t).cut;
      mask[w.edge] = 1;
    }
    rep.witness = std::move(w);
  }
  return rep;
}

inline FeasibilityReport verify_2dst(const DstInstance& inst, const SolutionSubgraph& solution) {
  return verify_2dst(inst, solution.edges);
}

}  // namespace dst2
