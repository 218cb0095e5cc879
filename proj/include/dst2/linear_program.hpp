#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dst2/errors.hpp"

namespace dst2 {

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

inline const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kEqual:
      return "=";
    case Relation::kGreaterEqual:
      return ">=";
  }
  return "?";
}

struct Constraint {
  std::vector<int> index;
  std::vector<double> value;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;

  double activity(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
    return s;
  }

  // Amount by which `x` violates the row (0 when satisfied).
  double violation(const std::vector<double>& x) const {
    const double a = activity(x);
    switch (relation) {
      case Relation::kLessEqual:
        return std::max(0.0, a - rhs);
      case Relation::kGreaterEqual:
        return std::max(0.0, rhs - a);
      case Relation::kEqual:
        return std::abs(a - rhs);
    }
    return 0.0;
  }
};

/// Minimisation LP over bounded columns: min c.x s.t. rows, lower <= x <= upper.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Constraint> rows;

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(double c, double lo, double hi) {
    if (lo > hi) throw ArgumentError("variable lower bound exceeds upper bound");
    cost.push_back(c);
    lower.push_back(lo);
    upper.push_back(hi);
    return num_vars() - 1;
  }

  int add_row(Constraint row) {
    for (int j : row.index)
      if (j < 0 || j >= num_vars()) throw ArgumentError("constraint references unknown variable");
    rows.push_back(std::move(row));
    return num_rows() - 1;
  }

  std::size_t num_nonzeros() const {
    std::size_t nnz = 0;
    for (const auto& r : rows) nnz += r.index.size();
    return nnz;
  }

  double objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (int j = 0; j < num_vars(); ++j) s += cost[j] * x[j];
    return s;
  }

  // Largest row or bound violation of `x`.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int j = 0; j < num_vars(); ++j) {
      worst = std::max(worst, lower[j] - x[j]);
      worst = std::max(worst, x[j] - upper[j]);
    }
    for (const auto& r : rows) worst = std::max(worst, r.violation(x));
    return worst;
  }
};

}  // namespace dst2
