#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "dst2/linear_program.hpp"

namespace dst2 {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kSizeCapped };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kIterationLimit:
      return "limit";
    case SolveStatus::kSizeCapped:
      return "size-capped";
  }
  return "unknown";
}

struct SolverConfig {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  long max_iterations = 5'000'000;
  int refactor_interval = 100;
  // Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_limit = 50;
  bool presolve = true;

  void validate() const {
    if (!(feasibility_tol > 0.0) || !(optimality_tol > 0.0))
      throw ArgumentError("solver tolerances must be positive");
    if (max_iterations < 1 || refactor_interval < 1) throw ArgumentError("solver limits must be positive");
  }
};

struct InfeasibilityCertificate {
  std::string source;  // "presolve" or "phase1"
  std::vector<int> rows;
  std::vector<double> multipliers;
  double infeasibility = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kIterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  long iterations = 0;
  InfeasibilityCertificate certificate;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Removes rows that force their columns to a bound (e.g. a sum of
// non-negative flows fixed at zero), tightens bounds from singleton rows
// and drops columns that no longer appear in any row.
class Presolver {
 public:
  Presolver(const LinearProgram& lp, double tol) : lp_(lp), tol_(tol) {}

  // Returns false when presolve alone proves infeasibility.
  bool run() {
    const int n = lp_.num_vars();
    const int m = lp_.num_rows();
    lo_ = lp_.lower;
    hi_ = lp_.upper;
    fixed_.assign(n, 0);
    value_.assign(n, 0.0);
    row_alive_.assign(m, 1);
    col_rows_.assign(n, {});
    for (int i = 0; i < m; ++i)
      for (int j : lp_.rows[i].index) col_rows_[j].push_back(i);

    std::deque<int> queue;
    std::vector<char> queued(m, 1);
    for (int i = 0; i < m; ++i) queue.push_back(i);
    for (int j = 0; j < n; ++j)
      if (lo_[j] == hi_[j]) fix(j, lo_[j], queue, queued);

    while (!queue.empty()) {
      const int i = queue.front();
      queue.pop_front();
      queued[i] = 0;
      if (!row_alive_[i]) continue;
      if (!examine_row(i, queue, queued)) return false;
    }

    // Columns left without rows go to their cheapest bound.
    for (int j = 0; j < n; ++j) {
      if (fixed_[j]) continue;
      bool used = false;
      for (int i : col_rows_[j]) used = used || row_alive_[i];
      if (!used) {
        const double v = lp_.cost[j] >= 0.0 ? lo_[j] : hi_[j];
        if (!std::isfinite(v)) continue;
        fixed_[j] = 1;
        value_[j] = v;
      }
    }

    new_index_.assign(n, -1);
    for (int j = 0; j < n; ++j) {
      if (fixed_[j]) continue;
      new_index_[j] = reduced_.add_variable(lp_.cost[j], lo_[j], hi_[j]);
      old_index_.push_back(j);
    }
    for (int i = 0; i < m; ++i) {
      if (!row_alive_[i]) continue;
      Constraint row;
      row.relation = lp_.rows[i].relation;
      row.rhs = lp_.rows[i].rhs;
      const auto& src = lp_.rows[i];
      for (std::size_t k = 0; k < src.index.size(); ++k) {
        const int j = src.index[k];
        if (fixed_[j]) {
          row.rhs -= src.value[k] * value_[j];
        } else if (src.value[k] != 0.0) {
          row.index.push_back(new_index_[j]);
          row.value.push_back(src.value[k]);
        }
      }
      reduced_.rows.push_back(std::move(row));
      row_origin_.push_back(i);
    }
    return true;
  }

  const LinearProgram& reduced() const { return reduced_; }
  const std::vector<int>& row_origin() const { return row_origin_; }
  int failed_row() const { return failed_row_; }
  double failed_amount() const { return failed_amount_; }

  std::vector<double> expand(const std::vector<double>& reduced_x) const {
    std::vector<double> x(value_);
    for (std::size_t k = 0; k < old_index_.size(); ++k) x[old_index_[k]] = reduced_x[k];
    return x;
  }

 private:
  void fix(int j, double v, std::deque<int>& queue, std::vector<char>& queued) {
    if (fixed_[j]) return;
    fixed_[j] = 1;
    value_[j] = v;
    lo_[j] = hi_[j] = v;
    for (int i : col_rows_[j]) {
      if (row_alive_[i] && !queued[i]) {
        queued[i] = 1;
        queue.push_back(i);
      }
    }
  }

  bool examine_row(int i, std::deque<int>& queue, std::vector<char>& queued) {
    const auto& row = lp_.rows[i];
    double rhs = row.rhs;
    double min_act = 0.0, max_act = 0.0;
    int live = 0, last = -1;
    double last_coef = 0.0;
    for (std::size_t k = 0; k < row.index.size(); ++k) {
      const int j = row.index[k];
      const double a = row.value[k];
      if (a == 0.0) continue;
      if (fixed_[j]) {
        rhs -= a * value_[j];
        continue;
      }
      ++live;
      last = j;
      last_coef = a;
      min_act += a > 0 ? a * lo_[j] : a * hi_[j];
      max_act += a > 0 ? a * hi_[j] : a * lo_[j];
    }
    const bool upper_side = row.relation != Relation::kGreaterEqual;  // activity <= rhs
    const bool lower_side = row.relation != Relation::kLessEqual;     // activity >= rhs
    if (live == 0) {
      if ((upper_side && 0.0 > rhs + tol_) || (lower_side && 0.0 < rhs - tol_)) {
        failed_row_ = i;
        failed_amount_ = std::abs(rhs);
        return false;
      }
      row_alive_[i] = 0;
      return true;
    }
    if ((upper_side && min_act > rhs + tol_) || (lower_side && max_act < rhs - tol_)) {
      failed_row_ = i;
      failed_amount_ = upper_side && min_act > rhs + tol_ ? min_act - rhs : rhs - max_act;
      return false;
    }
    if (live == 1) {
      double lo = -kInf, hi = kInf;
      if (upper_side) (last_coef > 0 ? hi : lo) = rhs / last_coef;
      if (lower_side) (last_coef > 0 ? lo : hi) = rhs / last_coef;
      lo_[last] = std::max(lo_[last], lo);
      hi_[last] = std::min(hi_[last], hi);
      if (lo_[last] > hi_[last] + tol_) {
        failed_row_ = i;
        failed_amount_ = lo_[last] - hi_[last];
        return false;
      }
      row_alive_[i] = 0;
      if (hi_[last] - lo_[last] <= tol_) fix(last, std::clamp(lo_[last], lp_.lower[last], lp_.upper[last]), queue, queued);
      return true;
    }
    // Forcing rows: the only way to satisfy them pins every column.
    const bool force_min = upper_side && std::isfinite(min_act) && min_act >= rhs - tol_;
    const bool force_max = lower_side && std::isfinite(max_act) && max_act <= rhs + tol_;
    if (force_min || force_max) {
      row_alive_[i] = 0;
      for (std::size_t k = 0; k < row.index.size(); ++k) {
        const int j = row.index[k];
        const double a = row.value[k];
        if (fixed_[j] || a == 0.0) continue;
        const bool take_low = force_min ? a > 0 : a < 0;
        fix(j, take_low ? lo_[j] : hi_[j], queue, queued);
      }
    }
    return true;
  }

  const LinearProgram& lp_;
  double tol_;
  std::vector<double> lo_, hi_, value_;
  std::vector<char> fixed_, row_alive_;
  std::vector<std::vector<int>> col_rows_;
  LinearProgram reduced_;
  std::vector<int> new_index_, old_index_, row_origin_;
  int failed_row_ = -1;
  double failed_amount_ = 0.0;
};

// Bounded primal revised simplex over rows A x + s = 0 (one logical s per
// row, bounds derived from the relation). The basis inverse is kept in
// product form and rebuilt periodically; phase 1 minimises the sum of
// bound infeasibilities of basic variables.
class RevisedSimplex {
 public:
  RevisedSimplex(const LinearProgram& lp, const SolverConfig& cfg)
      : cfg_(cfg), n_(lp.num_vars()), m_(lp.num_rows()) {
    const int total = n_ + m_;
    cost_.assign(total, 0.0);
    lb_.assign(total, 0.0);
    ub_.assign(total, 0.0);
    for (int j = 0; j < n_; ++j) {
      cost_[j] = lp.cost[j];
      lb_[j] = lp.lower[j];
      ub_[j] = lp.upper[j];
    }
    std::vector<int> count(n_ + 1, 0);
    for (const auto& r : lp.rows)
      for (int j : r.index) ++count[j + 1];
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j + 1];
    col_row_.assign(col_start_[n_], 0);
    col_val_.assign(col_start_[n_], 0.0);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int i = 0; i < m_; ++i) {
      const auto& r = lp.rows[i];
      for (std::size_t k = 0; k < r.index.size(); ++k) {
        const int j = r.index[k];
        col_row_[fill[j]] = i;
        col_val_[fill[j]++] = r.value[k];
      }
      const int s = n_ + i;
      switch (r.relation) {
        case Relation::kLessEqual:
          lb_[s] = -r.rhs;
          ub_[s] = kInf;
          break;
        case Relation::kGreaterEqual:
          lb_[s] = -kInf;
          ub_[s] = -r.rhs;
          break;
        case Relation::kEqual:
          lb_[s] = ub_[s] = -r.rhs;
          break;
      }
    }
    row_start_.assign(m_ + 1, 0);
    for (int i = 0; i < m_; ++i) row_start_[i + 1] = row_start_[i] + static_cast<int>(lp.rows[i].index.size());
    row_col_.reserve(row_start_[m_]);
    row_val_.reserve(row_start_[m_]);
    for (const auto& r : lp.rows) {
      row_col_.insert(row_col_.end(), r.index.begin(), r.index.end());
      row_val_.insert(row_val_.end(), r.value.begin(), r.value.end());
    }
  }

  SolveResult solve() {
    SolveResult result;
    const int total = n_ + m_;
    x_.assign(total, 0.0);
    pos_.assign(total, -1);
    head_.assign(m_, 0);
    d_.assign(total, 0.0);
    bool dual_start = true;
    for (int j = 0; j < n_; ++j) {
      // Boxed columns rest on the bound that makes the slack basis dual
      // feasible; anything else sends us straight to the primal method.
      if (cost_[j] < 0.0 && std::isfinite(ub_[j])) {
        x_[j] = ub_[j];
      } else {
        x_[j] = resting_value(j);
        if ((cost_[j] > 0.0 && !std::isfinite(lb_[j])) || (cost_[j] < 0.0 && !std::isfinite(ub_[j])))
          dual_start = false;
      }
    }
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
    }
    refactor();

    if (dual_start) {
      // The dual works on perturbed costs; an optimal dual basis is then
      // polished by the primal loop on the true costs.
      const auto outcome = run_dual(result);
      if (outcome == DualOutcome::kInfeasible || outcome == DualOutcome::kLimit) return finish(result);
    }
    run_primal(result);
    return finish(result);
  }

 private:
  enum class DualOutcome { kOptimal, kInfeasible, kLimit, kNeedsPrimal };

  SolveResult& finish(SolveResult& result) {
    result.iterations = iterations_;
    result.x.assign(x_.begin(), x_.begin() + n_);
    for (int j = 0; j < n_; ++j) result.x[j] = std::clamp(result.x[j], lb_[j], ub_[j]);
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += cost_[j] * result.x[j];
    result.objective = obj;
    return result;
  }

  // Deterministic cost shifts that break dual degeneracy. Each column is
  // pushed in the direction that keeps its resting bound dual feasible.
  void perturb_costs() {
    dual_cost_ = cost_;
    for (int j = 0; j < n_ + m_; ++j) {
      const bool lo = std::isfinite(lb_[j]), hi = std::isfinite(ub_[j]);
      if (lb_[j] == ub_[j] || (!lo && !hi)) continue;
      const double u = static_cast<double>(mix_bits(static_cast<std::uint64_t>(j)) >> 11) * 0x1.0p-53;
      const double eps = 5e-7 * (1.0 + std::abs(cost_[j])) * (1.0 + u);
      const bool at_lower = lo && (!hi || x_[j] <= lb_[j]);
      dual_cost_[j] += at_lower ? eps : -eps;
    }
  }

  static std::uint64_t mix_bits(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // d_j = c_j - y.a_j for every nonbasic column, y = c_B B^-1, using the
  // perturbed costs of the dual phase.
  void recompute_duals() {
    std::vector<double> y(m_);
    for (int k = 0; k < m_; ++k) y[k] = dual_cost_[head_[k]];
    btran(y);
    for (int j = 0; j < n_ + m_; ++j) {
      if (pos_[j] >= 0) {
        d_[j] = 0.0;
        continue;
      }
      double dot = 0.0;
      if (j < n_) {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) dot += y[col_row_[k]] * col_val_[k];
      } else {
        dot = y[j - n_];
      }
      d_[j] = dual_cost_[j] - dot;
    }
  }

  // Moves boxed columns with the wrong reduced-cost sign to their other
  // bound. A column with one infinite bound gets its dual-phase cost
  // shifted instead; the primal cleanup runs on the true costs anyway.
  // Returns false only for a dual infeasible free column.
  bool restore_dual_feasibility() {
    bool moved = false;
    constexpr double kShift = 1e-7;
    for (int j = 0; j < n_ + m_; ++j) {
      if (pos_[j] >= 0 || lb_[j] == ub_[j]) continue;
      const bool at_lower = x_[j] <= lb_[j];
      if (at_lower && d_[j] < -cfg_.optimality_tol) {
        if (std::isfinite(ub_[j])) {
          x_[j] = ub_[j];
          moved = true;
        } else {
          dual_cost_[j] += kShift - d_[j];
          d_[j] = kShift;
        }
      } else if (!at_lower && d_[j] > cfg_.optimality_tol) {
        if (std::isfinite(lb_[j])) {
          x_[j] = lb_[j];
          moved = true;
        } else if (std::isfinite(ub_[j])) {
          dual_cost_[j] -= kShift + d_[j];
          d_[j] = -kShift;
        } else {
          return false;
        }
      }
    }
    if (moved) recompute_basics();
    return true;
  }

  DualOutcome run_dual(SolveResult& result) {
    const double tol = cfg_.feasibility_tol;
    const double dtol = cfg_.optimality_tol;
    const int total = n_ + m_;
    perturb_costs();
    recompute_duals();
    if (!restore_dual_feasibility()) return DualOutcome::kNeedsPrimal;

    std::vector<double> rho(m_), row_alpha(total, 0.0), flip_col(m_, 0.0);
    std::vector<char> row_mark(total, 0);
    std::vector<int> row_touched;
    struct Candidate {
      int j;
      double ratio;
      double alpha;
    };
    std::vector<Candidate> cands;
    long since_refactor = 0;
    int degenerate_run = 0;
    bool confirmed = false;

    for (;;) {
      if (iterations_ >= cfg_.max_iterations) {
        result.status = SolveStatus::kIterationLimit;
        return DualOutcome::kLimit;
      }
      if (since_refactor >= cfg_.refactor_interval) {
        refactor();
        recompute_duals();
        if (!restore_dual_feasibility()) return DualOutcome::kNeedsPrimal;
        since_refactor = 0;
      }

      const bool bland = degenerate_run > cfg_.degenerate_limit;
      int p = -1;
      double worst = 0.0;
      for (int k = 0; k < m_; ++k) {
        const int j = head_[k];
        const double infeas = std::max(lb_[j] - x_[j], x_[j] - ub_[j]);
        if (infeas <= tol) continue;
        if (p < 0 || (bland ? j < head_[p] : infeas > worst)) {
          p = k;
          worst = infeas;
        }
      }
      if (p < 0) {
        if (!confirmed) {
          refactor();
          recompute_duals();
          if (!restore_dual_feasibility()) return DualOutcome::kNeedsPrimal;
          since_refactor = 0;
          confirmed = true;
          continue;
        }
        for (int j = 0; j < total; ++j) {
          if (pos_[j] >= 0 || lb_[j] == ub_[j]) continue;
          const bool at_lower = x_[j] <= lb_[j];
          if ((at_lower && d_[j] < -dtol) || (!at_lower && d_[j] > dtol)) return DualOutcome::kNeedsPrimal;
        }
        result.status = SolveStatus::kOptimal;
        return DualOutcome::kOptimal;
      }
      confirmed = false;

      const int leaving = head_[p];
      const bool below = x_[leaving] < lb_[leaving] - tol;
      const double target = below ? lb_[leaving] : ub_[leaving];

      // rho = e_p^T B^-1, then the pivot row over nonbasic columns.
      std::fill(rho.begin(), rho.end(), 0.0);
      rho[p] = 1.0;
      btran(rho);
      for (int i = 0; i < m_; ++i) {
        const double r = rho[i];
        if (r == 0.0) continue;
        for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
          const int j = row_col_[k];
          if (pos_[j] >= 0) continue;
          if (!row_mark[j]) {
            row_mark[j] = 1;
            row_touched.push_back(j);
          }
          row_alpha[j] += r * row_val_[k];
        }
        const int s = n_ + i;
        if (pos_[s] < 0) {
          if (!row_mark[s]) {
            row_mark[s] = 1;
            row_touched.push_back(s);
          }
          row_alpha[s] += r;
        }
      }

      // Column j moving in its allowed direction changes x_p by
      // -alpha_j * step; keep those that push x_p toward `target`.
      cands.clear();
      for (int j : row_touched) {
        const double a = row_alpha[j];
        if (std::abs(a) <= 1e-9 || lb_[j] == ub_[j]) continue;
        const bool at_lower = x_[j] <= lb_[j];
        const bool increases = at_lower;  // free columns are not produced by this model
        const double move = increases ? -a : a;  // sign of x_p change
        if (below ? move <= 0 : move >= 0) continue;
        const double dj = increases ? std::max(d_[j], 0.0) : std::max(-d_[j], 0.0);
        cands.push_back({j, dj / std::abs(a), a});
      }
      if (cands.empty()) {
        result.status = SolveStatus::kInfeasible;
        result.certificate.source = "dual-ray";
        result.certificate.infeasibility = worst;
        for (int i = 0; i < m_; ++i) {
          if (std::abs(rho[i]) > tol) {
            result.certificate.rows.push_back(i);
            result.certificate.multipliers.push_back(rho[i]);
          }
        }
        return DualOutcome::kInfeasible;
      }
      std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.ratio < b.ratio || (a.ratio == b.ratio && a.j < b.j);
      });

      // Bound-flipping ratio test: pass breakpoints while the leaving row
      // stays infeasible after flipping the column to its other bound.
      double slope = std::abs(x_[leaving] - target);
      std::size_t first_open = 0;
      while (first_open + 1 < cands.size()) {
        const auto& c = cands[first_open];
        const double range = ub_[c.j] - lb_[c.j];
        if (!std::isfinite(range)) break;
        const double after = slope - std::abs(c.alpha) * range;
        if (after < 0.0) break;
        slope = after;
        ++first_open;
      }
      if (first_open + 1 == cands.size()) {
        const auto& c = cands.back();
        const double range = ub_[c.j] - lb_[c.j];
        if (std::isfinite(range) && slope - std::abs(c.alpha) * range > tol) {
          // Flipping every candidate still leaves the row infeasible.
          result.status = SolveStatus::kInfeasible;
          result.certificate.source = "dual-ray";
          result.certificate.infeasibility = slope - std::abs(c.alpha) * range;
          for (int i = 0; i < m_; ++i) {
            if (std::abs(rho[i]) > tol) {
              result.certificate.rows.push_back(i);
              result.certificate.multipliers.push_back(rho[i]);
            }
          }
          return DualOutcome::kInfeasible;
        }
      }

      // Harris pass over the remaining breakpoints for a stable pivot.
      std::size_t pick = first_open;
      if (!bland) {
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t k = first_open; k < cands.size(); ++k) {
          const auto& c = cands[k];
          const double dj = std::abs(d_[c.j]);
          bound = std::min(bound, (dj + dtol) / std::abs(c.alpha));
        }
        double best_alpha = 0.0;
        for (std::size_t k = first_open; k < cands.size(); ++k) {
          if (cands[k].ratio > bound) break;
          if (std::abs(cands[k].alpha) > best_alpha) {
            best_alpha = std::abs(cands[k].alpha);
            pick = k;
          }
        }
      }
      const int entering = cands[pick].j;
      const double alpha_q = row_alpha[entering];
      const double theta_d = d_[entering] / alpha_q;

      // Flip the passed columns (all breakpoints strictly before `pick`
      // when Harris chose a later one are flipped too).
      bool flipped = false;
      std::fill(flip_col.begin(), flip_col.end(), 0.0);
      for (std::size_t k = 0; k < pick; ++k) {
        const int j = cands[k].j;
        const double from = x_[j];
        const double to = from <= lb_[j] ? ub_[j] : lb_[j];
        if (!std::isfinite(to)) continue;
        const double delta = to - from;
        x_[j] = to;
        flipped = true;
        if (j < n_) {
          for (int q = col_start_[j]; q < col_start_[j + 1]; ++q) flip_col[col_row_[q]] += col_val_[q] * delta;
        } else {
          flip_col[j - n_] += delta;
        }
      }
      if (flipped) {
        ftran_dense(flip_col);
        for (int k = 0; k < m_; ++k) x_[head_[k]] -= flip_col[k];
      }

      // Dual update along the pivot row.
      for (int j : row_touched) {
        if (j != entering) d_[j] -= theta_d * row_alpha[j];
        row_alpha[j] = 0.0;
        row_mark[j] = 0;
      }
      row_touched.clear();
      d_[entering] = 0.0;
      d_[leaving] = -theta_d;

      column_scatter(entering, work_, touched_);
      ftran_sparse(work_, touched_);
      const double pivot = work_[p];
      if (std::abs(pivot) <= 1e-11 || std::abs(pivot - alpha_q) > 1e-6 * (1.0 + std::abs(pivot))) {
        // Row and column disagree: the factorisation has drifted.
        for (int k : touched_) work_[k] = 0.0;
        touched_.clear();
        refactor();
        recompute_duals();
        if (!restore_dual_feasibility()) return DualOutcome::kNeedsPrimal;
        since_refactor = 0;
        ++iterations_;
        continue;
      }
      const double step = (x_[leaving] - target) / pivot;
      for (int k : touched_) {
        const double a = work_[k];
        if (a != 0.0) x_[head_[k]] -= step * a;
      }
      x_[entering] += step;
      x_[leaving] = target;
      pos_[leaving] = -1;
      head_[p] = entering;
      pos_[entering] = p;
      push_eta(p, work_, touched_);
      for (int k : touched_) work_[k] = 0.0;
      touched_.clear();

      ++iterations_;
      ++since_refactor;
      degenerate_run = std::abs(theta_d) <= 1e-12 ? degenerate_run + 1 : 0;
    }
  }

  void run_primal(SolveResult& result) {
    const int total = n_ + m_;
    std::vector<double> cb(m_), y(m_), d(total);
    long since_refactor = 0;
    int degenerate_run = 0;
    bool confirmed = false;

    for (;;) {
      if (iterations_ >= cfg_.max_iterations) {
        result.status = SolveStatus::kIterationLimit;
        return;
      }
      if (since_refactor >= cfg_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }

      const bool phase1 = build_costs(cb);
      y = cb;
      btran(y);
      for (int j = 0; j < total; ++j) {
        if (pos_[j] >= 0) continue;
        const double base = phase1 ? 0.0 : cost_[j];
        double dot = 0.0;
        if (j < n_) {
          for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) dot += y[col_row_[k]] * col_val_[k];
        } else {
          dot = y[j - n_];
        }
        d[j] = base - dot;
      }

      const bool bland = degenerate_run > cfg_.degenerate_limit;
      int entering = -1;
      int direction = 0;
      double best = 0.0;
      for (int j = 0; j < total; ++j) {
        if (pos_[j] >= 0 || lb_[j] == ub_[j]) continue;
        int dir = 0;
        if (d[j] < -cfg_.optimality_tol && x_[j] < ub_[j]) dir = 1;
        if (d[j] > cfg_.optimality_tol && x_[j] > lb_[j]) dir = -1;
        if (dir == 0) continue;
        const double score = std::abs(d[j]);
        if (entering < 0 || (!bland && score > best)) {
          entering = j;
          direction = dir;
          best = score;
          if (bland) break;
        }
      }

      if (entering < 0) {
        if (!confirmed) {
          // Re-derive the basic values before trusting the verdict.
          refactor();
          since_refactor = 0;
          confirmed = true;
          continue;
        }
        if (phase1) {
          result.status = SolveStatus::kInfeasible;
          result.certificate.source = "phase1";
          result.certificate.infeasibility = total_infeasibility();
          for (int i = 0; i < m_; ++i) {
            if (std::abs(y[i]) > cfg_.feasibility_tol) {
              result.certificate.rows.push_back(i);
              result.certificate.multipliers.push_back(y[i]);
            }
          }
        } else {
          result.status = SolveStatus::kOptimal;
        }
        return;
      }
      confirmed = false;

      column_scatter(entering, work_, touched_);
      ftran_sparse(work_, touched_);

      const auto step = ratio_test(entering, direction, phase1, bland);
      if (step.position < 0 && !step.flip) {
        result.status = SolveStatus::kUnbounded;
        return;
      }
      ++iterations_;
      ++since_refactor;
      degenerate_run = step.theta <= 1e-12 ? degenerate_run + 1 : 0;

      for (int k : touched_) {
        const double a = work_[k];
        if (a != 0.0) x_[head_[k]] -= direction * step.theta * a;
      }
      x_[entering] += direction * step.theta;

      if (step.flip) {
        x_[entering] = direction > 0 ? ub_[entering] : lb_[entering];
      } else {
        const int p = step.position;
        const int leaving = head_[p];
        x_[leaving] = step.leave_value;
        pos_[leaving] = -1;
        head_[p] = entering;
        pos_[entering] = p;
        push_eta(p, work_, touched_);
      }
      for (int k : touched_) work_[k] = 0.0;
      touched_.clear();
    }
  }

  struct Eta {
    int pivot = 0;
    double pivot_value = 1.0;  // 1 / alpha_p
    std::vector<int> index;
    std::vector<double> value;  // -alpha_i / alpha_p
  };

  struct Step {
    int position = -1;
    bool flip = false;
    double theta = 0.0;
    double leave_value = 0.0;
  };

  double resting_value(int j) const {
    if (std::isfinite(lb_[j])) return lb_[j];
    if (std::isfinite(ub_[j])) return ub_[j];
    return 0.0;
  }

  bool build_costs(std::vector<double>& cb) const {
    bool infeasible = false;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (x_[j] < lb_[j] - cfg_.feasibility_tol) {
        cb[k] = -1.0;
        infeasible = true;
      } else if (x_[j] > ub_[j] + cfg_.feasibility_tol) {
        cb[k] = 1.0;
        infeasible = true;
      } else {
        cb[k] = 0.0;
      }
    }
    if (!infeasible)
      for (int k = 0; k < m_; ++k) cb[k] = cost_[head_[k]];
    return infeasible;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      s += std::max(0.0, lb_[j] - x_[j]) + std::max(0.0, x_[j] - ub_[j]);
    }
    return s;
  }

  Step ratio_test(int q, int dir, bool phase1, bool bland) const {
    const double tol = cfg_.feasibility_tol;
    const double piv_tol = 1e-9;
    double harris = kInf;
    for (int k : touched_) {
      const double alpha = work_[k];
      if (std::abs(alpha) <= piv_tol) continue;
      const double rate = -dir * alpha;
      double lo, hi;
      effective_bounds(head_[k], phase1, lo, hi);
      const double v = x_[head_[k]];
      if (rate < 0 && std::isfinite(lo)) harris = std::min(harris, (v - lo + tol) / -rate);
      if (rate > 0 && std::isfinite(hi)) harris = std::min(harris, (hi - v + tol) / rate);
    }
    const double range = ub_[q] - lb_[q];

    Step best;
    double best_alpha = 0.0, best_ratio = kInf;
    int best_var = std::numeric_limits<int>::max();
    for (int k : touched_) {
      const double alpha = work_[k];
      if (std::abs(alpha) <= piv_tol) continue;
      const double rate = -dir * alpha;
      double lo, hi;
      effective_bounds(head_[k], phase1, lo, hi);
      const double v = x_[head_[k]];
      double ratio;
      double target;
      if (rate < 0 && std::isfinite(lo)) {
        ratio = (v - lo) / -rate;
        target = lo;
      } else if (rate > 0 && std::isfinite(hi)) {
        ratio = (hi - v) / rate;
        target = hi;
      } else {
        continue;
      }
      ratio = std::max(ratio, 0.0);
      bool take;
      if (bland) {
        take = ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && head_[k] < best_var);
      } else {
        take = ratio <= harris && std::abs(alpha) > best_alpha;
      }
      if (take) {
        best.position = k;
        best.theta = ratio;
        best.leave_value = target;
        best_alpha = std::abs(alpha);
        best_ratio = ratio;
        best_var = head_[k];
      }
    }
    if (std::isfinite(range) && (best.position < 0 || range <= best.theta)) {
      Step flip;
      flip.flip = true;
      flip.theta = range;
      return flip;
    }
    return best;
  }

  void effective_bounds(int j, bool phase1, double& lo, double& hi) const {
    lo = lb_[j];
    hi = ub_[j];
    if (!phase1) return;
    if (x_[j] < lb_[j] - cfg_.feasibility_tol) {
      lo = -kInf;
      hi = lb_[j];
    } else if (x_[j] > ub_[j] + cfg_.feasibility_tol) {
      lo = ub_[j];
      hi = kInf;
    }
  }

  void column_scatter(int j, std::vector<double>& v, std::vector<int>& touched) {
    if (static_cast<int>(v.size()) != m_) {
      v.assign(m_, 0.0);
      mark_.assign(m_, 0);
    }
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        const int r = col_row_[k];
        if (!mark_[r]) {
          mark_[r] = 1;
          touched.push_back(r);
        }
        v[r] += col_val_[k];
      }
    } else {
      const int r = j - n_;
      mark_[r] = 1;
      touched.push_back(r);
      v[r] = 1.0;
    }
  }

  // v <- E_k ... E_1 v, extending `touched` with fill positions.
  void ftran_sparse(std::vector<double>& v, std::vector<int>& touched) {
    for (const auto& eta : etas_) {
      const double vp = v[eta.pivot];
      if (vp == 0.0) continue;
      v[eta.pivot] = vp * eta.pivot_value;
      for (std::size_t k = 0; k < eta.index.size(); ++k) {
        const int i = eta.index[k];
        if (!mark_[i]) {
          mark_[i] = 1;
          touched.push_back(i);
        }
        v[i] += eta.value[k] * vp;
      }
    }
    for (int i : touched) mark_[i] = 0;
  }

  void ftran_dense(std::vector<double>& v) const {
    for (const auto& eta : etas_) {
      const double vp = v[eta.pivot];
      if (vp == 0.0) continue;
      v[eta.pivot] = vp * eta.pivot_value;
      for (std::size_t k = 0; k < eta.index.size(); ++k) v[eta.index[k]] += eta.value[k] * vp;
    }
  }

  void btran(std::vector<double>& y) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = y[it->pivot] * it->pivot_value;
      for (std::size_t k = 0; k < it->index.size(); ++k) s += y[it->index[k]] * it->value[k];
      y[it->pivot] = s;
    }
  }

  void push_eta(int p, const std::vector<double>& alpha, const std::vector<int>& touched) {
    Eta eta;
    eta.pivot = p;
    const double ap = alpha[p];
    eta.pivot_value = 1.0 / ap;
    for (int i : touched) {
      if (i == p || alpha[i] == 0.0) continue;
      eta.index.push_back(i);
      eta.value.push_back(-alpha[i] / ap);
    }
    etas_.push_back(std::move(eta));
  }

  // Rebuilds the product-form inverse from scratch: row singletons first
  // (no fill), then the remaining bump by fewest-entries column with
  // threshold pivoting. Singular columns are swapped for logicals.
  void refactor() {
    etas_.clear();
    if (static_cast<int>(work_.size()) != m_) {
      work_.assign(m_, 0.0);
      mark_.assign(m_, 0);
    }
    std::vector<int> new_head(m_, -1);
    std::vector<char> taken(m_, 0);
    std::vector<int> structs;
    for (int k = 0; k < m_; ++k) {
      const int j = head_[k];
      if (j >= n_) {
        new_head[j - n_] = j;
        taken[j - n_] = 1;
      } else {
        structs.push_back(j);
      }
    }
    std::sort(structs.begin(), structs.end());
    const int ns = static_cast<int>(structs.size());
    std::vector<int> row_count(m_, 0), col_count(ns, 0);
    std::vector<std::vector<int>> row_cols(m_);
    for (int s = 0; s < ns; ++s) {
      const int j = structs[s];
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        const int r = col_row_[k];
        if (taken[r]) continue;
        ++row_count[r];
        ++col_count[s];
        row_cols[r].push_back(s);
      }
    }
    std::vector<char> done(ns, 0);
    std::deque<int> singles;
    for (int r = 0; r < m_; ++r)
      if (!taken[r] && row_count[r] == 1) singles.push_back(r);

    std::vector<int> touched;
    auto retire = [&](int s) {
      done[s] = 1;
      const int j = structs[s];
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        const int r = col_row_[k];
        if (taken[r]) continue;
        if (--row_count[r] == 1) singles.push_back(r);
      }
    };
    auto take_row = [&](int r) {
      taken[r] = 1;
      for (int s : row_cols[r])
        if (!done[s]) --col_count[s];
    };
    auto place = [&](int s, int preferred) {
      const int j = structs[s];
      touched.clear();
      column_scatter(j, work_, touched);
      ftran_sparse(work_, touched);
      double biggest = 0.0;
      for (int i : touched)
        if (!taken[i]) biggest = std::max(biggest, std::abs(work_[i]));
      int p = -1;
      if (biggest > 1e-9) {
        if (preferred >= 0 && !taken[preferred] && std::abs(work_[preferred]) >= 1e-3 * biggest) {
          p = preferred;
        } else {
          int best_count = std::numeric_limits<int>::max();
          for (int i : touched) {
            if (taken[i] || std::abs(work_[i]) < 0.1 * biggest) continue;
            if (row_count[i] < best_count || (row_count[i] == best_count && i < p)) {
              best_count = row_count[i];
              p = i;
            }
          }
        }
      }
      if (p >= 0) {
        push_eta(p, work_, touched);
        new_head[p] = j;
        take_row(p);
      } else {
        x_[j] = nearest_bound(j);  // dependent column leaves the basis
      }
      for (int i : touched) work_[i] = 0.0;
      retire(s);
    };

    int remaining = ns;
    while (remaining > 0) {
      while (!singles.empty()) {
        const int r = singles.front();
        singles.pop_front();
        if (taken[r] || row_count[r] != 1) continue;
        int s = -1;
        for (int c : row_cols[r])
          if (!done[c]) s = c;
        if (s < 0) continue;
        place(s, r);
        --remaining;
      }
      if (remaining == 0) break;
      int pick = -1;
      for (int s = 0; s < ns; ++s)
        if (!done[s] && (pick < 0 || col_count[s] < col_count[pick])) pick = s;
      place(pick, -1);
      --remaining;
    }

    for (int r = 0; r < m_; ++r)
      if (new_head[r] < 0) new_head[r] = n_ + r;  // repair with the logical
    std::fill(pos_.begin(), pos_.end(), -1);
    head_ = new_head;
    for (int k = 0; k < m_; ++k) pos_[head_[k]] = k;
    for (int j = 0; j < n_ + m_; ++j)
      if (pos_[j] < 0 && !(x_[j] >= lb_[j] && x_[j] <= ub_[j])) x_[j] = nearest_bound(j);
    recompute_basics();
  }

  double nearest_bound(int j) const {
    if (std::isfinite(lb_[j]) && std::isfinite(ub_[j]))
      return std::abs(x_[j] - lb_[j]) <= std::abs(ub_[j] - x_[j]) ? lb_[j] : ub_[j];
    return resting_value(j);
  }

  void recompute_basics() {
    std::vector<double> rhs(m_, 0.0);
    for (int j = 0; j < n_ + m_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      if (j < n_) {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) rhs[col_row_[k]] -= col_val_[k] * x_[j];
      } else {
        rhs[j - n_] -= x_[j];
      }
    }
    ftran_dense(rhs);
    for (int k = 0; k < m_; ++k) x_[head_[k]] = rhs[k];
  }

  SolverConfig cfg_;
  int n_, m_;
  std::vector<double> cost_, lb_, ub_, x_;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;
  std::vector<double> d_;
  std::vector<double> dual_cost_;
  std::vector<int> head_, pos_;
  std::vector<Eta> etas_;
  std::vector<double> work_;
  std::vector<int> touched_;
  std::vector<char> mark_;
  long iterations_ = 0;
};

}  // namespace detail

/// Solves a bounded LP to optimality. Deterministic: identical input and
/// config give bit-identical output.
inline SolveResult solve_lp(const LinearProgram& lp, const SolverConfig& config = {}) {
  config.validate();
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.lower[j] > lp.upper[j]) throw ArgumentError("variable bounds are inconsistent");

  if (!config.presolve) {
    detail::RevisedSimplex simplex(lp, config);
    return simplex.solve();
  }
  detail::Presolver pre(lp, config.feasibility_tol);
  SolveResult result;
  if (!pre.run()) {
    result.status = SolveStatus::kInfeasible;
    result.certificate.source = "presolve";
    result.certificate.rows = {pre.failed_row()};
    result.certificate.multipliers = {1.0};
    result.certificate.infeasibility = pre.failed_amount();
    result.x.assign(lp.num_vars(), 0.0);
    return result;
  }
  const auto& reduced = pre.reduced();
  SolveResult inner;
  if (reduced.num_rows() == 0) {
    inner.status = SolveStatus::kOptimal;
    for (int j = 0; j < reduced.num_vars(); ++j)
      inner.x.push_back(reduced.cost[j] >= 0.0 ? reduced.lower[j] : reduced.upper[j]);
  } else {
    detail::RevisedSimplex simplex(reduced, config);
    inner = simplex.solve();
  }
  result.status = inner.status;
  result.iterations = inner.iterations;
  result.x = pre.expand(inner.x);
  result.objective = lp.objective(result.x);
  result.certificate = inner.certificate;
  for (int& r : result.certificate.rows) r = pre.row_origin()[r];
  return result;
}

}  // namespace dst2
