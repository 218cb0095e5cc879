#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "dst2/lp_model.hpp"
#include "dst2/shallow_tree.hpp"
#include "dst2/solution.hpp"
#include "dst2/verify.hpp"

namespace dst2 {

inline constexpr double kSupportThreshold = 1e-9;

/// Seedable generator with independent child streams. Stream k of seed s
/// is seeded from a SplitMix64 hash of (s, k), so any iteration can be
/// replayed on its own.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static Rng stream(std::uint64_t seed, std::uint64_t k) { return Rng(mix(mix(seed) ^ mix(k + 1))); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Top-down min(x_e, x_parent(e)); tree edge ids are already parent-first.
inline std::vector<double> monotone_clamp(const ShallowTree& tree, std::span<const double> xhat) {
  if (static_cast<int>(xhat.size()) != tree.num_edges()) throw ArgumentError("xhat size does not match tree");
  std::vector<double> out(xhat.begin(), xhat.end());
  for (int e = 0; e < tree.num_edges(); ++e) {
    out[e] = std::clamp(out[e], 0.0, 1.0);
    const int p = tree.parent_edge(e);
    if (p >= 0) out[e] = std::min(out[e], out[p]);
  }
  return out;
}

/// GKR rounding on a shallow tree with precomputed conditional marking
/// probabilities.
class GkrSampler {
 public:
  GkrSampler(const ShallowTree& tree, std::span<const double> xhat) : tree_(&tree) {
    const auto clamped = monotone_clamp(tree, xhat);
    prob_.resize(clamped.size());
    for (int e = 0; e < tree.num_edges(); ++e) {
      const int p = tree.parent_edge(e);
      const double base = p < 0 ? 1.0 : clamped[p];
      prob_[e] = clamped[e] < kSupportThreshold || base < kSupportThreshold
                     ? 0.0
                     : std::min(1.0, clamped[e] / base);
    }
  }

  const std::vector<double>& conditional_probabilities() const { return prob_; }

  // Marked flags per tree edge; the marked set is a root-containing subtree.
  std::vector<char> sample(Rng& rng) const {
    std::vector<char> marked(prob_.size(), 0);
    for (int e = 0; e < static_cast<int>(prob_.size()); ++e) {
      const int p = tree_->parent_edge(e);
      if (p >= 0 && !marked[p]) continue;
      if (prob_[e] > 0.0) marked[e] = rng.bernoulli(prob_[e]);
    }
    return marked;
  }

 private:
  const ShallowTree* tree_;
  std::vector<double> prob_;
};

inline std::vector<char> gkr_round(const ShallowTree& tree, std::span<const double> xhat, Rng& rng) {
  return GkrSampler(tree, xhat).sample(rng);
}

// True when the marked subtree reaches a node of group `terminal_index`.
inline bool reaches_group(const ShallowTree& tree, const std::vector<char>& marked, int terminal_index) {
  for (int node : tree.group(terminal_index))
    if (marked[tree.edge_into(node)]) return true;
  return false;
}

/// Distribution over u->v paths obtained by stripping a flow.
struct PathDistribution {
  int tree_edge = -1;
  VertexId source = 0;
  VertexId sink = 0;
  std::vector<EdgePath> paths;
  std::vector<double> weights;  // sums to 1
  std::vector<double> cumulative;

  bool empty() const { return paths.empty(); }

  // Probability that a sampled path uses graph edge `e`.
  double marginal(EdgeId e) const {
    double p = 0.0;
    for (std::size_t k = 0; k < paths.size(); ++k)
      if (std::find(paths[k].edges.begin(), paths[k].edges.end(), e) != paths[k].edges.end()) p += weights[k];
    return p;
  }
};

/// Greedy path stripping of a source->sink flow of value `value`: take the
/// BFS-shortest path in the positive support (ties by smallest edge id),
/// subtract its bottleneck, repeat. Cycle flow left over is dropped.
inline PathDistribution decompose_flow(const DirectedMultigraph& g, VertexId source, VertexId sink,
                                       std::span<const double> flow, double value, int tree_edge = -1) {
  g.check_vertex(source);
  g.check_vertex(sink);
  if (static_cast<EdgeId>(flow.size()) != g.num_edges()) throw ArgumentError("flow size does not match graph");
  if (!(value > kSupportThreshold)) throw ArgumentError("flow value below support threshold");
  if (source == sink) throw ArgumentError("flow endpoints coincide");

  std::vector<double> rest(flow.begin(), flow.end());
  for (double& f : rest) f = std::max(f, 0.0);
  auto outflow = [&] {
    double s = 0.0;
    for (EdgeId e : g.out_edges(source)) s += rest[e];
    for (EdgeId e : g.in_edges(source)) s -= rest[e];
    return s;
  };

  PathDistribution dist;
  dist.tree_edge = tree_edge;
  dist.source = source;
  dist.sink = sink;
  std::vector<EdgeId> via(g.num_vertices());
  double taken = 0.0;
  while (outflow() >= kSupportThreshold) {
    std::fill(via.begin(), via.end(), -1);
    std::deque<VertexId> queue{source};
    std::vector<char> seen(g.num_vertices(), 0);
    seen[source] = 1;
    while (!queue.empty() && !seen[sink]) {
      const VertexId v = queue.front();
      queue.pop_front();
      for (EdgeId e : g.out_edges(v)) {
        const VertexId w = g.edge(e).head;
        if (seen[w] || rest[e] < kSupportThreshold) continue;
        seen[w] = 1;
        via[w] = e;
        queue.push_back(w);
      }
    }
    if (!seen[sink]) {
      // Round-off from the solver may strand a sliver of outflow.
      if (outflow() > 1e-7) throw ModelError("flow has no source-sink path while outflow remains");
      break;
    }
    std::vector<EdgeId> ids;
    for (VertexId v = sink; v != source; v = g.edge(via[v]).tail) ids.push_back(via[v]);
    std::reverse(ids.begin(), ids.end());
    double push = rest[ids.front()];
    for (EdgeId e : ids) push = std::min(push, rest[e]);
    for (EdgeId e : ids) rest[e] -= push;
    dist.paths.push_back(EdgePath{ids, true});
    dist.weights.push_back(push / value);
    taken += push / value;
  }
  if (dist.paths.empty()) throw ModelError("flow carries no source-sink path");
  double acc = 0.0;
  for (double& w : dist.weights) {
    w /= taken;
    acc += w;
    dist.cumulative.push_back(acc);
  }
  dist.cumulative.back() = 1.0;
  return dist;
}

inline const EdgePath& sample_path(const PathDistribution& dist, Rng& rng) {
  if (dist.empty()) throw ArgumentError("empty path distribution");
  const double u = rng.uniform();
  const auto it = std::upper_bound(dist.cumulative.begin(), dist.cumulative.end(), u);
  const auto k = std::min<std::size_t>(it - dist.cumulative.begin(), dist.paths.size() - 1);
  return dist.paths[k];
}

// ceil(20 D ln n), at least 1.
inline int default_outer_iterations(int depth, int num_vertices) {
  const double raw = 20.0 * depth * std::log(static_cast<double>(std::max(num_vertices, 1)));
  return std::max(1, static_cast<int>(std::ceil(raw - 1e-9)));
}

// ceil((4 beta + 2) ln D), at least 1.
inline int default_samples(double beta, int depth) {
  const double raw = (4.0 * beta + 2.0) * std::log(static_cast<double>(std::max(depth, 1)));
  return std::max(1, static_cast<int>(std::ceil(raw - 1e-9)));
}

struct RoundingConfig {
  std::uint64_t seed = 1;
  int iterations = 0;  // 0 selects default_outer_iterations
  int samples = 0;     // 0 selects default_samples
  double iteration_multiplier = 1.0;
  bool prune_result = false;
  int threads = 1;

  void validate() const {
    if (iterations < 0 || samples < 0) throw ArgumentError("iteration and sample counts must be non-negative");
    if (!(iteration_multiplier > 0.0)) throw ArgumentError("iteration multiplier must be positive");
    if (threads < 1) throw ArgumentError("thread count must be >= 1");
  }
};

struct SampledEdge {
  EdgeId edge;
  Provenance from;
};

/// The rounding loop with its inputs prepared once: path distributions for every
/// supported tree edge and the GKR sampler.
class Rounder {
 public:
  Rounder(const DstInstance& inst, const ShallowTree& tree, const LpModel& model, const LpSolution& lp,
          const RoundingConfig& config)
      : inst_(&inst), tree_(&tree), config_(config) {
    config.validate();
    if (!lp.optimal()) throw ArgumentError("rounding needs an optimal LP solution");
    if (static_cast<long>(lp.values.size()) != model.num_vars()) throw ArgumentError("LP solution size mismatch");
    const auto& vi = model.index;
    const int te = tree.num_edges();
    const int m = inst.graph.num_edges();
    xhat_.resize(te);
    for (int e = 0; e < te; ++e) xhat_[e] = lp.values[vi.xhat(e)];
    sampler_.emplace(tree, xhat_);
    dists_.resize(te);
    std::vector<double> f(m);
    for (int e = 0; e < te; ++e) {
      if (sampler_->conditional_probabilities()[e] <= 0.0) continue;
      for (int k = 0; k < m; ++k) f[k] = lp.values[vi.f(e, k)];
      dists_[e] = decompose_flow(inst.graph, tree.label_of_edge_tail(e), tree.label_of_edge_head(e), f,
                                 xhat_[e], e);
    }
    const int depth = tree.depth_bound();
    iterations_ = config.iterations > 0
                      ? config.iterations
                      : std::max(1, static_cast<int>(std::ceil(config.iteration_multiplier *
                                                               default_outer_iterations(depth, inst.graph.num_vertices()) -
                                                               1e-9)));
    samples_ = config.samples > 0 ? config.samples : default_samples(model.beta, depth);
  }

  int iterations() const { return iterations_; }
  int samples() const { return samples_; }
  const std::vector<double>& xhat() const { return xhat_; }
  const GkrSampler& sampler() const { return *sampler_; }
  const PathDistribution& distribution(int tree_edge) const { return dists_.at(tree_edge); }

  // H_j for outer iteration j, first occurrence of each edge only.
  std::vector<SampledEdge> iteration(int j) const {
    Rng rng = Rng::stream(config_.seed, static_cast<std::uint64_t>(j));
    const auto marked = sampler_->sample(rng);
    std::vector<char> seen(inst_->graph.num_edges(), 0);
    std::vector<SampledEdge> out;
    for (int e = 0; e < tree_->num_edges(); ++e) {
      if (!marked[e]) continue;
      for (int l = 0; l < samples_; ++l) {
        for (EdgeId g : sample_path(dists_[e], rng).edges) {
          if (seen[g]) continue;
          seen[g] = 1;
          out.push_back({g, {j, e, l}});
        }
      }
    }
    return out;
  }

  SolutionSubgraph run() const {
    std::vector<std::vector<SampledEdge>> per_iter(iterations_);
    const int workers = std::min(config_.threads, iterations_);
    if (workers <= 1) {
      for (int j = 0; j < iterations_; ++j) per_iter[j] = iteration(j);
    } else {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (int j = w; j < iterations_; j += workers) per_iter[j] = iteration(j);
        });
    }
    SolutionSubgraph out;
    for (const auto& h : per_iter)
      for (const auto& s : h) out.provenance.try_emplace(s.edge, s.from);
    for (const auto& [e, p] : out.provenance) out.edges.push_back(e);
    out.cost = inst_->graph.cost_of(out.edges);
    return out;
  }

 private:
  const DstInstance* inst_;
  const ShallowTree* tree_;
  RoundingConfig config_;
  std::vector<double> xhat_;
  std::optional<GkrSampler> sampler_;
  std::vector<PathDistribution> dists_;
  int iterations_ = 1;
  int samples_ = 1;
};

/// Drops edges in order of decreasing cost (ties: larger id first) while
/// the edge set stays feasible.
inline SolutionSubgraph reverse_delete(const DstInstance& inst, SolutionSubgraph solution) {
  std::vector<EdgeId> order = solution.edges;
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    const double ca = inst.graph.edge(a).cost, cb = inst.graph.edge(b).cost;
    return ca > cb || (ca == cb && a > b);
  });
  std::vector<EdgeId> keep = solution.edges;
  for (EdgeId e : order) {
    std::vector<EdgeId> trial;
    trial.reserve(keep.size());
    for (EdgeId k : keep)
      if (k != e) trial.push_back(k);
    if (verify_2dst(inst, trial).feasible) keep = std::move(trial);
  }
  for (auto it = solution.provenance.begin(); it != solution.provenance.end();)
    it = std::binary_search(keep.begin(), keep.end(), it->first) ? std::next(it) : solution.provenance.erase(it);
  solution.edges = std::move(keep);
  solution.cost = inst.graph.cost_of(solution.edges);
  solution.pruned = true;
  return solution;
}

/// Runs the rounding loop and attaches the verification verdict. Pruning, when
/// requested, only happens on a feasible union.
inline SolutionSubgraph round_solution(const DstInstance& inst, const ShallowTree& tree, const LpModel& model,
                                       const LpSolution& lp, const RoundingConfig& config) {
  const Rounder rounder(inst, tree, model, lp, config);
  auto solution = rounder.run();
  solution.report = verify_2dst(inst, solution);
  if (config.prune_result && solution.report->feasible) {
    solution = reverse_delete(inst, std::move(solution));
    solution.report = verify_2dst(inst, solution);
  }
  return solution;
}

}  // namespace dst2
