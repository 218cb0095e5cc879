#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "dst2/rounding.hpp"
#include "dst2/verify.hpp"

namespace dst2 {

struct ExactConfig {
  int max_edges = 22;
  double time_budget_seconds = 0.0;  // 0 means unlimited

  void validate() const {
    if (max_edges < 1) throw ArgumentError("exact edge cap must be >= 1");
    if (time_budget_seconds < 0.0) throw ArgumentError("time budget must be non-negative");
  }
};

enum class ExactStatus { kOptimal, kInfeasible, kTimeout };

inline const char* exact_status_name(ExactStatus s) {
  switch (s) {
    case ExactStatus::kOptimal:
      return "optimal";
    case ExactStatus::kInfeasible:
      return "infeasible";
    case ExactStatus::kTimeout:
      return "timeout";
  }
  return "?";
}

struct ExactResult {
  ExactStatus status = ExactStatus::kInfeasible;
  double cost = 0.0;
  std::vector<EdgeId> edges;  // best found; optimal unless timed out
  long nodes = 0;

  bool optimal() const { return status == ExactStatus::kOptimal; }
};

namespace detail {

class ExactSearch {
 public:
  ExactSearch(const DstInstance& inst, const ExactConfig& cfg) : inst_(inst), cfg_(cfg) {
    const auto& g = inst.graph;
    state_.assign(g.num_edges(), kUndecided);
    for (const auto& e : g.edges()) {
      if (e.cost == 0.0)
        state_[e.id] = kIn;
      else
        order_.push_back(e.id);
    }
    std::sort(order_.begin(), order_.end(), [&](EdgeId a, EdgeId b) {
      const double ca = g.edge(a).cost, cb = g.edge(b).cost;
      return ca > cb || (ca == cb && a < b);
    });
    start_ = std::chrono::steady_clock::now();
  }

  ExactResult run() {
    ExactResult r;
    // Everything included is feasible after the precheck.
    best_cost_ = inst_.graph.cost_of(all_edges());
    best_ = all_edges();
    recurse(0, 0.0);
    r.status = timed_out_ ? ExactStatus::kTimeout : ExactStatus::kOptimal;
    r.edges = strip_zero_cost(best_);
    r.cost = inst_.graph.cost_of(r.edges);
    r.nodes = nodes_;
    return r;
  }

 private:
  static constexpr char kUndecided = 0, kIn = 1, kOut = 2;

  std::vector<EdgeId> all_edges() const {
    std::vector<EdgeId> out(inst_.graph.num_edges());
    for (EdgeId e = 0; e < inst_.graph.num_edges(); ++e) out[e] = e;
    return out;
  }

  bool feasible_with(char exclude_state, bool only_in) const {
    std::vector<char> mask(state_.size());
    for (std::size_t e = 0; e < state_.size(); ++e)
      mask[e] = only_in ? state_[e] == kIn : state_[e] != exclude_state;
    for (VertexId t : inst_.terminals)
      if (max_flow_unit_masked(inst_.graph, mask, inst_.root, t, 2).value < 2) return false;
    return true;
  }

  bool out_of_time() {
    if (cfg_.time_budget_seconds <= 0.0 || (nodes_ & 1023) != 0) return timed_out_;
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
    if (dt.count() > cfg_.time_budget_seconds) timed_out_ = true;
    return timed_out_;
  }

  void recurse(std::size_t k, double cost) {
    ++nodes_;
    if (out_of_time() || cost >= best_cost_) return;
    if (feasible_with(kOut, true)) {
      best_cost_ = cost;
      best_.clear();
      for (std::size_t e = 0; e < state_.size(); ++e)
        if (state_[e] == kIn) best_.push_back(static_cast<EdgeId>(e));
      return;
    }
    if (k == order_.size()) return;
    const EdgeId e = order_[k];
    state_[e] = kOut;
    if (feasible_with(kOut, false)) recurse(k + 1, cost);
    state_[e] = kIn;
    recurse(k + 1, cost + inst_.graph.edge(e).cost);
    state_[e] = kUndecided;
  }

  std::vector<EdgeId> strip_zero_cost(std::vector<EdgeId> edges) const {
    for (std::size_t i = edges.size(); i-- > 0;) {
      if (inst_.graph.edge(edges[i]).cost != 0.0) continue;
      auto trial = edges;
      trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
      if (verify_2dst(inst_, trial).feasible) edges = std::move(trial);
    }
    return edges;
  }

  const DstInstance& inst_;
  ExactConfig cfg_;
  std::vector<char> state_;
  std::vector<EdgeId> order_;
  std::vector<EdgeId> best_;
  double best_cost_ = 0.0;
  long nodes_ = 0;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Exact 2-DST optimum by branch and bound over edge subsets. Positive-cost
/// edges are branched in descending cost, exclusion first; a branch dies as
/// soon as its remaining edges stop being feasible or its cost reaches the
/// incumbent. Zero-cost edges start included and are pruned to a minimal
/// set at the end.
inline ExactResult exact_2dst(const DstInstance& inst, const ExactConfig& config = {}) {
  inst.validate();
  config.validate();
  if (inst.graph.num_edges() > config.max_edges)
    throw SizeError("too many edges for exact search", static_cast<std::size_t>(inst.graph.num_edges()),
                    static_cast<std::size_t>(config.max_edges));
  for (VertexId t : inst.terminals)
    if (max_flow_unit(inst.graph, inst.root, t).value < 2) return ExactResult{};
  return detail::ExactSearch(inst, config).run();
}

struct RandomInstanceSpec {
  int n = 6;
  int m = 14;
  int h = 2;
  int cost_min = 1;
  int cost_max = 10;
  std::uint64_t seed = 1;
  bool guarantee_feasible = true;
};

/// Reproducible random instance with integer costs in [cost_min, cost_max].
/// Vertex 0 is the root. With guarantee_feasible, two fresh r->t paths
/// (one to three edges each) are planted per terminal before the noise
/// edges, so the full graph is feasible; edge order is then shuffled.
inline DstInstance random_instance(const RandomInstanceSpec& spec) {
  if (spec.n < 2) throw ArgumentError("random instance needs n >= 2");
  if (spec.h < 1 || spec.h > spec.n - 1) throw ArgumentError("random instance needs 1 <= h <= n-1");
  if (spec.cost_min < 0 || spec.cost_max < spec.cost_min) throw ArgumentError("bad cost range");
  if (spec.m < 0) throw ArgumentError("edge count must be non-negative");
  if (spec.guarantee_feasible && spec.m < 2 * spec.h)
    throw ArgumentError("planting needs m >= 2h (" + std::to_string(2 * spec.h) + ")");

  Rng rng(Rng::mix(spec.seed));
  auto below = [&](int k) { return static_cast<int>(rng.next() % static_cast<std::uint64_t>(k)); };
  auto cost = [&] { return static_cast<double>(spec.cost_min + below(spec.cost_max - spec.cost_min + 1)); };

  DstInstance inst;
  inst.graph = DirectedMultigraph(spec.n);
  inst.root = 0;
  std::vector<VertexId> pool;
  for (VertexId v = 1; v < spec.n; ++v) pool.push_back(v);
  for (int i = 0; i < spec.h; ++i) {
    const int k = i + below(static_cast<int>(pool.size()) - i);
    std::swap(pool[i], pool[k]);
  }
  inst.terminals.assign(pool.begin(), pool.begin() + spec.h);
  std::sort(inst.terminals.begin(), inst.terminals.end());

  struct Raw {
    VertexId tail, head;
    double cost;
  };
  std::vector<Raw> raw;
  if (spec.guarantee_feasible) {
    int paths_left = 2 * spec.h;
    for (VertexId t : inst.terminals) {
      for (int copy = 0; copy < 2; ++copy) {
        --paths_left;
        const int budget = spec.m - static_cast<int>(raw.size()) - paths_left;
        std::vector<VertexId> inner;
        for (VertexId v = 1; v < spec.n; ++v)
          if (v != t) inner.push_back(v);
        const int hops = std::min({budget, 3, static_cast<int>(inner.size()) + 1});
        const int len = 1 + below(hops);
        VertexId at = inst.root;
        for (int s = 0; s + 1 < len; ++s) {
          const int k = s + below(static_cast<int>(inner.size()) - s);
          std::swap(inner[s], inner[k]);
          raw.push_back({at, inner[s], cost()});
          at = inner[s];
        }
        raw.push_back({at, t, cost()});
      }
    }
  }
  while (static_cast<int>(raw.size()) < spec.m) {
    const VertexId a = below(spec.n);
    VertexId b = below(spec.n - 1);
    if (b >= a) ++b;
    raw.push_back({a, b, cost()});
  }
  for (int i = static_cast<int>(raw.size()) - 1; i > 0; --i) std::swap(raw[i], raw[below(i + 1)]);
  for (const auto& r : raw) inst.graph.add_edge(r.tail, r.head, r.cost);
  return inst;
}

}  // namespace dst2
