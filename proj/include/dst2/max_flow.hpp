#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dst2/graph.hpp"

namespace dst2 {

namespace detail {

// Residual network for augmenting-path max-flow. Arcs are stored in pairs
// (forward at 2k, reverse at 2k+1); adjacency follows insertion order, so
// the BFS, and therefore the flow, is deterministic in edge-id order.
template <class Cap>
class ResidualNetwork {
 public:
  explicit ResidualNetwork(int num_nodes) : adj_(num_nodes) {}

  int add_arc(int from, int to, Cap cap) {
    const int id = static_cast<int>(head_.size());
    head_.push_back(to);
    residual_.push_back(cap);
    adj_[from].push_back(id);
    head_.push_back(from);
    residual_.push_back(Cap{});
    adj_[to].push_back(id + 1);
    return id;
  }

  // Shortest-augmenting-path flow. Stops once `limit` units are routed.
  Cap run(int source, int sink, Cap limit, Cap eps) {
    Cap total{};
    std::vector<int> via(adj_.size());
    while (total < limit) {
      std::fill(via.begin(), via.end(), -1);
      via[source] = -2;
      std::deque<int> queue{source};
      while (!queue.empty() && via[sink] == -1) {
        const int v = queue.front();
        queue.pop_front();
        for (int arc : adj_[v]) {
          const int w = head_[arc];
          if (via[w] == -1 && residual_[arc] > eps) {
            via[w] = arc;
            queue.push_back(w);
          }
        }
      }
      if (via[sink] == -1) break;
      Cap push = limit - total;
      for (int v = sink; v != source; v = head_[via[v] ^ 1]) push = std::min(push, residual_[via[v]]);
      for (int v = sink; v != source; v = head_[via[v] ^ 1]) {
        residual_[via[v]] -= push;
        residual_[via[v] ^ 1] += push;
      }
      total += push;
    }
    return total;
  }

  // Nodes reachable from `source` through arcs with residual above eps.
  std::vector<char> source_side(int source, Cap eps) const {
    std::vector<char> seen(adj_.size(), 0);
    std::deque<int> queue{source};
    seen[source] = 1;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int arc : adj_[v]) {
        if (!seen[head_[arc]] && residual_[arc] > eps) {
          seen[head_[arc]] = 1;
          queue.push_back(head_[arc]);
        }
      }
    }
    return seen;
  }

  Cap flow_on(int arc) const { return residual_[arc ^ 1]; }

 private:
  std::vector<std::vector<int>> adj_;
  std::vector<int> head_;
  std::vector<Cap> residual_;
};

}  // namespace detail

struct UnitFlowResult {
  int value = 0;
  std::vector<EdgeId> cut;  // ascending edge ids crossing the min cut
};

struct CapacitatedFlowResult {
  double value = 0.0;
  double cut_capacity = 0.0;
  std::vector<EdgeId> cut;
  std::vector<double> edge_flow;
};

/// Max number of edge-disjoint source->sink paths using only edges with
/// `allowed[e]` set, together with a witnessing minimum cut. Stops early
/// once `limit` paths are found; the cut is then not minimum.
inline UnitFlowResult max_flow_unit_masked(const DirectedMultigraph& g, std::span<const char> allowed,
                                           VertexId source, VertexId sink,
                                           int limit = std::numeric_limits<int>::max()) {
  g.check_vertex(source);
  g.check_vertex(sink);
  if (static_cast<EdgeId>(allowed.size()) != g.num_edges())
    throw ArgumentError("edge mask size does not match graph");
  UnitFlowResult result;
  if (source == sink) return result;
  detail::ResidualNetwork<int> net(g.num_vertices());
  std::vector<int> arc_of(g.num_edges(), -1);
  for (const auto& e : g.edges())
    if (allowed[e.id]) arc_of[e.id] = net.add_arc(e.tail, e.head, 1);
  result.value = net.run(source, sink, limit, 0);
  const auto side = net.source_side(source, 0);
  for (const auto& e : g.edges())
    if (allowed[e.id] && side[e.tail] && !side[e.head]) result.cut.push_back(e.id);
  return result;
}

inline UnitFlowResult max_flow_unit(const DirectedMultigraph& g, VertexId source, VertexId sink,
                                    std::optional<EdgeId> forbidden = std::nullopt) {
  std::vector<char> allowed(g.num_edges(), 1);
  if (forbidden) {
    g.check_edge(*forbidden);
    allowed[*forbidden] = 0;
  }
  return max_flow_unit_masked(g, allowed, source, sink);
}

// Max flow restricted to an edge subset of `g`.
inline UnitFlowResult max_flow_unit_on(const DirectedMultigraph& g, std::span<const EdgeId> edges,
                                       VertexId source, VertexId sink,
                                       int limit = std::numeric_limits<int>::max()) {
  std::vector<char> allowed(g.num_edges(), 0);
  for (EdgeId e : edges) {
    g.check_edge(e);
    allowed[e] = 1;
  }
  return max_flow_unit_masked(g, allowed, source, sink, limit);
}

inline constexpr double kResidualEps = 1e-12;

/// Real-valued max flow with per-edge capacities; also reports the min cut.
inline CapacitatedFlowResult max_flow_capacitated(const DirectedMultigraph& g,
                                                  std::span<const double> capacities,
                                                  VertexId source, VertexId sink) {
  g.check_vertex(source);
  g.check_vertex(sink);
  if (static_cast<EdgeId>(capacities.size()) != g.num_edges())
    throw ArgumentError("capacity vector size does not match graph");
  for (double c : capacities)
    if (!(c >= 0.0) || !std::isfinite(c)) throw ArgumentError("capacities must be finite and non-negative");
  CapacitatedFlowResult result;
  result.edge_flow.assign(g.num_edges(), 0.0);
  if (source == sink) return result;
  detail::ResidualNetwork<double> net(g.num_vertices());
  std::vector<int> arc_of(g.num_edges());
  for (const auto& e : g.edges()) arc_of[e.id] = net.add_arc(e.tail, e.head, capacities[e.id]);
  result.value = net.run(source, sink, std::numeric_limits<double>::infinity(), kResidualEps);
  const auto side = net.source_side(source, kResidualEps);
  for (const auto& e : g.edges()) {
    result.edge_flow[e.id] = net.flow_on(arc_of[e.id]);
    if (side[e.tail] && !side[e.head] && capacities[e.id] > 0.0) {
      result.cut.push_back(e.id);
      result.cut_capacity += capacities[e.id];
    }
  }
  return result;
}

}  // namespace dst2
