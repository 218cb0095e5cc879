// Shared fixtures and brute-force oracles for the test binaries. Nothing here
// calls the library's flow, verification or exact code.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dst2/dst2.hpp"

namespace dst2::testing {

// Diamond r=0 -> {1,2} -> t=3 plus an expensive chord 1->2. OPT = 4.
inline DstInstance diamond() {
  DstInstance inst;
  inst.graph = DirectedMultigraph(4);
  inst.graph.add_edge(0, 1, 1);
  inst.graph.add_edge(0, 2, 1);
  inst.graph.add_edge(1, 3, 1);
  inst.graph.add_edge(2, 3, 1);
  inst.graph.add_edge(1, 2, 5);
  inst.root = 0;
  inst.terminals = {3};
  return inst;
}

// A single r->t path; no two edge-disjoint paths exist.
inline DstInstance single_path() {
  DstInstance inst;
  inst.graph = DirectedMultigraph(3);
  inst.graph.add_edge(0, 1, 1);
  inst.graph.add_edge(1, 2, 1);
  inst.root = 0;
  inst.terminals = {2};
  return inst;
}

// Steiner vertices s_0..s_{k-1} on a cycle, terminal t_i adjacent to s_i and
// s_{i+1} plus a private root edge. Each terminal needs one of its two
// Steiner vertices, so the LP pays half of every root->s edge on odd k while
// an integral solution buys a vertex cover. Optional noise edges.
inline DstInstance ring_instance(int k, double steiner_cost, double terminal_cost, int noise, std::uint64_t seed) {
  DstInstance inst;
  inst.graph = DirectedMultigraph(1 + 2 * k);
  inst.root = 0;
  for (int i = 0; i < k; ++i) inst.graph.add_edge(0, 1 + i, steiner_cost);
  for (int i = 0; i < k; ++i) {
    const VertexId t = 1 + k + i;
    inst.terminals.push_back(t);
    inst.graph.add_edge(0, t, terminal_cost);
    inst.graph.add_edge(1 + i, t, terminal_cost);
    inst.graph.add_edge(1 + (i + 1) % k, t, terminal_cost);
  }
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> vert(0, 2 * k), cost(2, 9);
  for (int j = 0; j < noise;) {
    const int a = vert(gen), b = vert(gen);
    if (a == b) continue;
    inst.graph.add_edge(a, b, cost(gen));
    ++j;
  }
  return inst;
}

struct Solved {
  DstInstance inst;
  ShallowTree tree;
  LpModel model;
  LpSolution lp;
  double beta = 0.0;
};

// Same stages as the pipeline: tree, LP, solve, flow tidying.
inline Solved solve_lp(DstInstance inst, int depth = 2, double beta_mult = 1.0) {
  Solved s;
  s.inst = std::move(inst);
  s.tree = build_shallow_tree(s.inst, {depth, true, ShallowTreeConfig{}.max_nodes});
  s.beta = congestion_parameter(depth, s.inst.num_terminals(), beta_mult);
  s.model = build_lp(s.inst, s.tree, s.beta);
  s.lp = tidy_flows(s.model, solve_model(s.model));
  return s;
}

inline DstInstance planted(int n, int m, int h, std::uint64_t seed) {
  RandomInstanceSpec spec;
  spec.n = n;
  spec.m = m;
  spec.h = h;
  spec.seed = seed;
  return random_instance(spec);
}

// Every vertex-simple s->t path inside the allowed edges, as edge bitmasks.
// Two edge-disjoint walks always shorten to two edge-disjoint simple paths,
// so simple paths suffice for Menger-type questions.
inline std::vector<std::uint64_t> simple_path_masks(const DirectedMultigraph& g, const std::vector<char>& allowed,
                                                    VertexId s, VertexId t) {
  std::vector<std::uint64_t> out;
  std::vector<char> on_path(g.num_vertices(), 0);
  std::function<void(VertexId, std::uint64_t)> dfs = [&](VertexId v, std::uint64_t mask) {
    if (v == t) {
      out.push_back(mask);
      return;
    }
    on_path[v] = 1;
    for (const auto& e : g.edges())
      if (e.tail == v && allowed[e.id] && !on_path[e.head]) dfs(e.head, mask | (std::uint64_t{1} << e.id));
    on_path[v] = 0;
  };
  dfs(s, 0);
  return out;
}

inline bool brute_two_disjoint(const DirectedMultigraph& g, const std::vector<char>& allowed, VertexId s,
                               VertexId t) {
  const auto paths = simple_path_masks(g, allowed, s, t);
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if ((paths[i] & paths[j]) == 0) return true;
  return false;
}

inline bool brute_feasible(const DstInstance& inst, const std::vector<char>& allowed) {
  for (VertexId t : inst.terminals)
    if (!brute_two_disjoint(inst.graph, allowed, inst.root, t)) return false;
  return true;
}

// Cheapest feasible edge subset by full enumeration; negative when none.
inline double brute_opt(const DstInstance& inst) {
  const int m = inst.graph.num_edges();
  double best = -1.0;
  std::vector<char> allowed(m);
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << m); ++sub) {
    double c = 0.0;
    for (int e = 0; e < m; ++e) {
      allowed[e] = (sub >> e) & 1;
      if (allowed[e]) c += inst.graph.edge(e).cost;
    }
    if (best >= 0.0 && c >= best) continue;
    if (brute_feasible(inst, allowed)) best = c;
  }
  return best;
}

// Multigraph with parallel edges allowed, uniform random endpoints.
inline DirectedMultigraph random_multigraph(int n, int m, std::mt19937_64& gen) {
  DirectedMultigraph g(n);
  std::uniform_int_distribution<int> vert(0, n - 1), cost(1, 9);
  while (g.num_edges() < m) {
    const int a = vert(gen), b = vert(gen);
    if (a != b) g.add_edge(a, b, cost(gen));
  }
  return g;
}

// DSS instance made feasible by two directed cycles through all terminals on
// fresh edges, each hop optionally detouring through a Steiner vertex.
inline DssInstance random_dss(int n, int k, int noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  DssInstance inst;
  inst.graph = DirectedMultigraph(n);
  std::vector<VertexId> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::shuffle(order.begin(), order.end(), gen);
  inst.terminals.assign(order.begin(), order.begin() + k);
  std::vector<VertexId> steiner(order.begin() + k, order.end());
  std::uniform_int_distribution<int> cost(1, 9), coin(0, 1);
  for (int cycle = 0; cycle < 2; ++cycle) {
    auto cyc = inst.terminals;
    std::shuffle(cyc.begin(), cyc.end(), gen);
    for (int i = 0; i < k; ++i) {
      const VertexId a = cyc[i], b = cyc[(i + 1) % k];
      if (!steiner.empty() && coin(gen)) {
        const VertexId s = steiner[gen() % steiner.size()];
        inst.graph.add_edge(a, s, cost(gen));
        inst.graph.add_edge(s, b, cost(gen));
      } else {
        inst.graph.add_edge(a, b, cost(gen));
      }
    }
  }
  std::uniform_int_distribution<int> vert(0, n - 1);
  for (int i = 0; i < noise;) {
    const int a = vert(gen), b = vert(gen);
    if (a == b) continue;
    inst.graph.add_edge(a, b, cost(gen));
    ++i;
  }
  std::sort(inst.terminals.begin(), inst.terminals.end());
  return inst;
}

inline std::vector<char> all_edges(const DirectedMultigraph& g) { return std::vector<char>(g.num_edges(), 1); }

inline std::vector<char> mask_of(const DirectedMultigraph& g, const std::vector<EdgeId>& edges) {
  std::vector<char> m(g.num_edges(), 0);
  for (EdgeId e : edges) m[e] = 1;
  return m;
}

}  // namespace dst2::testing
