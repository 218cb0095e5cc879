#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dst2/errors.hpp"

namespace dst2 {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

struct Edge {
  EdgeId id = 0;
  VertexId tail = 0;
  VertexId head = 0;
  double cost = 0.0;
};

/// Directed multigraph with dense edge ids and non-negative costs.
///
/// Parallel and antiparallel edges are distinct edges; self-loops are
/// rejected. Vertices carry a display name used by the file formats.
class DirectedMultigraph {
 public:
  DirectedMultigraph() = default;

  explicit DirectedMultigraph(VertexId num_vertices) {
    for (VertexId v = 0; v < num_vertices; ++v) add_vertex("v" + std::to_string(v));
  }

  VertexId add_vertex(std::string name) {
    if (name_index_.count(name)) throw ArgumentError("duplicate vertex name '" + name + "'");
    const auto id = static_cast<VertexId>(names_.size());
    name_index_.emplace(name, id);
    names_.push_back(std::move(name));
    out_.emplace_back();
    in_.emplace_back();
    return id;
  }

  EdgeId add_edge(VertexId tail, VertexId head, double cost) {
    check_vertex(tail);
    check_vertex(head);
    if (tail == head) throw ArgumentError("self-loop at vertex " + names_[tail]);
    if (!(cost >= 0.0) || !std::isfinite(cost))
      throw ArgumentError("edge cost must be finite and non-negative");
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({id, tail, head, cost});
    out_[tail].push_back(id);
    in_[head].push_back(id);
    return id;
  }

  VertexId num_vertices() const { return static_cast<VertexId>(names_.size()); }
  EdgeId num_edges() const { return static_cast<EdgeId>(edges_.size()); }

  const Edge& edge(EdgeId e) const {
    check_edge(e);
    return edges_[e];
  }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const EdgeId> out_edges(VertexId v) const {
    check_vertex(v);
    return out_[v];
  }
  std::span<const EdgeId> in_edges(VertexId v) const {
    check_vertex(v);
    return in_[v];
  }

  const std::string& name(VertexId v) const {
    check_vertex(v);
    return names_[v];
  }
  std::optional<VertexId> find_vertex(const std::string& name) const {
    auto it = name_index_.find(name);
    if (it == name_index_.end()) return std::nullopt;
    return it->second;
  }

  bool has_vertex(VertexId v) const { return v >= 0 && v < num_vertices(); }
  bool has_edge(EdgeId e) const { return e >= 0 && e < num_edges(); }

  void check_vertex(VertexId v) const {
    if (!has_vertex(v)) throw ArgumentError("unknown vertex id " + std::to_string(v));
  }
  void check_edge(EdgeId e) const {
    if (!has_edge(e)) throw ArgumentError("unknown edge id " + std::to_string(e));
  }

  double cost_of(std::span<const EdgeId> edge_ids) const {
    double total = 0.0;
    for (EdgeId e : edge_ids) total += edge(e).cost;
    return total;
  }

  // Same vertices and edge ids, every edge flipped.
  DirectedMultigraph reversed() const {
    DirectedMultigraph g;
    for (const auto& n : names_) g.add_vertex(n);
    for (const auto& e : edges_) g.add_edge(e.head, e.tail, e.cost);
    return g;
  }

  // Keeps all vertices and only the listed edges, renumbered densely in
  // ascending order of their original id.
  DirectedMultigraph subgraph(std::span<const EdgeId> keep) const {
    std::vector<EdgeId> ids(keep.begin(), keep.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    DirectedMultigraph g;
    for (const auto& n : names_) g.add_vertex(n);
    for (EdgeId e : ids) {
      const auto& ed = edge(e);
      g.add_edge(ed.tail, ed.head, ed.cost);
    }
    return g;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VertexId> name_index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
};

/// A 2-DST problem: graph, root and terminal set.
struct DstInstance {
  DirectedMultigraph graph;
  VertexId root = 0;
  std::vector<VertexId> terminals;

  int num_terminals() const { return static_cast<int>(terminals.size()); }

  int terminal_index(VertexId v) const {
    auto it = std::find(terminals.begin(), terminals.end(), v);
    return it == terminals.end() ? -1 : static_cast<int>(it - terminals.begin());
  }

  void validate() const {
    graph.check_vertex(root);
    if (terminals.empty()) throw ArgumentError("instance needs at least one terminal");
    std::vector<VertexId> sorted = terminals;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ArgumentError("duplicate terminal");
    for (VertexId t : terminals) {
      graph.check_vertex(t);
      if (t == root) throw ArgumentError("root cannot be a terminal");
    }
  }
};

/// A walk in a graph given as consecutive edge ids.
struct EdgePath {
  std::vector<EdgeId> edges;
  bool simple = false;

  bool empty() const { return edges.empty(); }
  std::size_t size() const { return edges.size(); }

  VertexId source(const DirectedMultigraph& g) const { return g.edge(edges.front()).tail; }
  VertexId target(const DirectedMultigraph& g) const { return g.edge(edges.back()).head; }

  bool is_walk(const DirectedMultigraph& g) const {
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (g.edge(edges[i - 1]).head != g.edge(edges[i]).tail) return false;
    return true;
  }

  bool has_distinct_vertices(const DirectedMultigraph& g) const {
    if (edges.empty()) return true;
    std::vector<VertexId> seen{source(g)};
    for (EdgeId e : edges) seen.push_back(g.edge(e).head);
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
  }

  static EdgePath make(const DirectedMultigraph& g, std::vector<EdgeId> ids) {
    EdgePath p{std::move(ids), false};
    if (!p.is_walk(g)) throw ArgumentError("edge sequence is not a walk");
    p.simple = p.has_distinct_vertices(g);
    return p;
  }
};

enum class Direction { kForward, kBackward };

// Vertices reachable from `source`, ascending.
inline std::vector<VertexId> reachable_set(const DirectedMultigraph& g, VertexId source,
                                           Direction dir) {
  g.check_vertex(source);
  std::vector<char> seen(g.num_vertices(), 0);
  std::deque<VertexId> queue{source};
  seen[source] = 1;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    const auto incident = dir == Direction::kForward ? g.out_edges(v) : g.in_edges(v);
    for (EdgeId e : incident) {
      const VertexId w = dir == Direction::kForward ? g.edge(e).head : g.edge(e).tail;
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::vector<VertexId> out;
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

// Sorted, de-duplicated copy of an edge id list.
inline std::vector<EdgeId> normalized_edge_set(std::span<const EdgeId> ids) {
  std::vector<EdgeId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace dst2
