#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dst2/graph.hpp"

namespace dst2 {

// Where an output edge first came from: outer iteration, tree edge and
// sample index (all zero-based).
struct Provenance {
  int iteration = 0;
  int tree_edge = 0;
  int sample = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FeasibilityWitness {
  EdgeId edge = -1;  // -1 when the terminal is unreachable outright
  VertexId terminal = 0;
  std::vector<EdgeId> cut;
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<int> flows;  // indexed like the instance terminals
  std::optional<FeasibilityWitness> witness;
};

/// Edge subset of an instance graph together with its cost.
struct SolutionSubgraph {
  std::vector<EdgeId> edges;  // ascending, no duplicates
  double cost = 0.0;
  std::map<EdgeId, Provenance> provenance;
  std::optional<FeasibilityReport> report;
  bool pruned = false;

  static SolutionSubgraph from_edges(const DirectedMultigraph& g, std::span<const EdgeId> ids) {
    SolutionSubgraph s;
    s.edges = normalized_edge_set(ids);
    for (EdgeId e : s.edges) g.check_edge(e);
    s.cost = g.cost_of(s.edges);
    return s;
  }

  bool contains(EdgeId e) const { return std::binary_search(edges.begin(), edges.end(), e); }
  bool verified_feasible() const { return report && report->feasible; }
};

}  // namespace dst2
