#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dst2/graph.hpp"
#include "dst2/linear_program.hpp"
#include "dst2/shallow_tree.hpp"
#include "dst2/simplex.hpp"

namespace dst2 {

enum class VarKind { kEdge, kTreeEdge, kGroupFlow, kMapFlow, kTerminalMapFlow };

struct VarKey {
  VarKind kind = VarKind::kEdge;
  int terminal = -1;
  int tree_edge = -1;
  int edge = -1;

  friend bool operator==(const VarKey&, const VarKey&) = default;
};

/// Dense numbering of the LP columns. Layout, in order: x_e, xhat_te,
/// fhat(t,te), f(te,e), ft(t,te,e); each block is row-major in the key
/// order given.
class VarIndex {
 public:
  VarIndex() = default;
  VarIndex(int num_edges, int num_tree_edges, int num_terminals)
      : m_(num_edges), te_(num_tree_edges), h_(num_terminals) {}

  int num_edges() const { return m_; }
  int num_tree_edges() const { return te_; }
  int num_terminals() const { return h_; }

  long size() const {
    return static_cast<long>(m_) + te_ + static_cast<long>(h_) * te_ + static_cast<long>(te_) * m_ +
           static_cast<long>(h_) * te_ * m_;
  }

  int x(int e) const { return e; }
  int xhat(int te) const { return m_ + te; }
  int fhat(int t, int te) const { return m_ + te_ + t * te_ + te; }
  int f(int te, int e) const { return m_ + te_ + h_ * te_ + te * m_ + e; }
  int ft(int t, int te, int e) const { return m_ + te_ + h_ * te_ + te_ * m_ + (t * te_ + te) * m_ + e; }

  VarKey key(long index) const {
    if (index < 0 || index >= size()) throw ArgumentError("variable index out of range");
    long k = index;
    if (k < m_) return {VarKind::kEdge, -1, -1, static_cast<int>(k)};
    k -= m_;
    if (k < te_) return {VarKind::kTreeEdge, -1, static_cast<int>(k), -1};
    k -= te_;
    if (k < static_cast<long>(h_) * te_) return {VarKind::kGroupFlow, static_cast<int>(k / te_), static_cast<int>(k % te_), -1};
    k -= static_cast<long>(h_) * te_;
    if (k < static_cast<long>(te_) * m_) return {VarKind::kMapFlow, -1, static_cast<int>(k / m_), static_cast<int>(k % m_)};
    k -= static_cast<long>(te_) * m_;
    const long block = k / m_;
    return {VarKind::kTerminalMapFlow, static_cast<int>(block / te_), static_cast<int>(block % te_),
            static_cast<int>(k % m_)};
  }

  long index_of(const VarKey& key) const {
    switch (key.kind) {
      case VarKind::kEdge:
        return x(key.edge);
      case VarKind::kTreeEdge:
        return xhat(key.tree_edge);
      case VarKind::kGroupFlow:
        return fhat(key.terminal, key.tree_edge);
      case VarKind::kMapFlow:
        return f(key.tree_edge, key.edge);
      case VarKind::kTerminalMapFlow:
        return ft(key.terminal, key.tree_edge, key.edge);
    }
    return -1;
  }

  // x_<e>, xh_<te>, fh_<t>_<te>, f_<te>_<e>, ft_<t>_<te>_<e>; t is the
  // terminal's position in the instance.
  std::string name(long index) const {
    const auto k = key(index);
    switch (k.kind) {
      case VarKind::kEdge:
        return "x_" + std::to_string(k.edge);
      case VarKind::kTreeEdge:
        return "xh_" + std::to_string(k.tree_edge);
      case VarKind::kGroupFlow:
        return "fh_" + std::to_string(k.terminal) + "_" + std::to_string(k.tree_edge);
      case VarKind::kMapFlow:
        return "f_" + std::to_string(k.tree_edge) + "_" + std::to_string(k.edge);
      case VarKind::kTerminalMapFlow:
        return "ft_" + std::to_string(k.terminal) + "_" + std::to_string(k.tree_edge) + "_" +
               std::to_string(k.edge);
    }
    return {};
  }

  std::optional<long> parse_name(std::string_view name) const {
    auto split = [](std::string_view s) {
      std::vector<int> parts;
      std::size_t start = 0;
      while (start <= s.size()) {
        const auto end = s.find('_', start);
        const auto piece = s.substr(start, end == std::string_view::npos ? s.size() - start : end - start);
        int v = 0;
        auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
        if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) return std::vector<int>{};
        parts.push_back(v);
        if (end == std::string_view::npos) break;
        start = end + 1;
      }
      return parts;
    };
    const auto us = name.find('_');
    if (us == std::string_view::npos) return std::nullopt;
    const auto prefix = name.substr(0, us);
    const auto nums = split(name.substr(us + 1));
    auto in = [](int v, int hi) { return v >= 0 && v < hi; };
    if (prefix == "x" && nums.size() == 1 && in(nums[0], m_)) return x(nums[0]);
    if (prefix == "xh" && nums.size() == 1 && in(nums[0], te_)) return xhat(nums[0]);
    if (prefix == "fh" && nums.size() == 2 && in(nums[0], h_) && in(nums[1], te_)) return fhat(nums[0], nums[1]);
    if (prefix == "f" && nums.size() == 2 && in(nums[0], te_) && in(nums[1], m_)) return f(nums[0], nums[1]);
    if (prefix == "ft" && nums.size() == 3 && in(nums[0], h_) && in(nums[1], te_) && in(nums[2], m_))
      return ft(nums[0], nums[1], nums[2]);
    return std::nullopt;
  }

 private:
  int m_ = 0, te_ = 0, h_ = 0;
};

enum class RowFamily { kGst, kCong, kDiv, kBounds };

inline const char* family_name(RowFamily f) {
  switch (f) {
    case RowFamily::kGst:
      return "gst";
    case RowFamily::kCong:
      return "cong";
    case RowFamily::kDiv:
      return "div";
    case RowFamily::kBounds:
      return "bounds";
  }
  return "?";
}

/// The LP relaxation over a shallow tree: min sum c_e x_e subject to the
/// group-Steiner flow rows on the tree (gst), the tree-edge-to-path flow
/// rows with congestion beta (cong), and the per-terminal divergence rows
/// (div); every column lies in [0,1].
struct LpModel {
  LinearProgram program;
  std::vector<RowFamily> family;
  VarIndex index;
  double beta = 1.0;

  int num_rows() const { return program.num_rows(); }
  long num_vars() const { return program.num_vars(); }

  int count_rows(RowFamily f) const {
    int c = 0;
    for (auto g : family) c += g == f;
    return c;
  }
};

struct LpBuildOptions {
  std::size_t max_nonzeros = 5'000'000;
  bool include_div = true;
};

/// beta = ceil(multiplier * 2 * D * h^(1/D)).
inline double congestion_parameter(int depth, int num_terminals, double multiplier = 1.0) {
  if (depth < 1 || num_terminals < 1) throw ArgumentError("congestion parameter needs D >= 1 and h >= 1");
  if (!(multiplier > 0.0)) throw ArgumentError("beta multiplier must be positive");
  const double raw = multiplier * 2.0 * depth * std::pow(static_cast<double>(num_terminals), 1.0 / depth);
  // Absorb pow() round-off so exact integers (h^(1/D) = 2) stay exact.
  return std::ceil(raw - 1e-9 * std::max(1.0, raw));
}

// Upper bound on the constraint-matrix nonzeros of build_lp.
inline std::size_t projected_lp_nonzeros(std::size_t m, std::size_t tree_edges, std::size_t h, bool div) {
  const std::size_t em = tree_edges * m;
  std::size_t nnz = 4 * h * tree_edges + 5 * em + 2 * tree_edges + m;
  if (div) nnz += 5 * h * em + 2 * h * tree_edges + h * m;
  return nnz;
}

inline LpModel build_lp(const DstInstance& inst, const ShallowTree& tree, double beta,
                        const LpBuildOptions& options = {}) {
  inst.validate();
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  if (tree.num_groups() != inst.num_terminals()) throw ArgumentError("tree was built for another instance");
  const auto& g = inst.graph;
  const int m = g.num_edges();
  const int te = tree.num_edges();
  const int h = inst.num_terminals();
  const int n = g.num_vertices();
  const auto projected = projected_lp_nonzeros(m, te, h, options.include_div);
  if (projected > options.max_nonzeros) throw SizeError("LP too large", projected, options.max_nonzeros);

  LpModel model;
  model.beta = beta;
  model.index = VarIndex(m, te, h);
  const auto& vi = model.index;
  auto& lp = model.program;
  const long nvars = vi.size();
  lp.cost.assign(nvars, 0.0);
  lp.lower.assign(nvars, 0.0);
  lp.upper.assign(nvars, 1.0);
  for (int e = 0; e < m; ++e) lp.cost[vi.x(e)] = g.edge(e).cost;

  auto emit = [&](RowFamily fam, Constraint&& row) {
    lp.rows.push_back(std::move(row));
    model.family.push_back(fam);
  };
  auto row_of = [](Relation rel, double rhs) {
    Constraint c;
    c.relation = rel;
    c.rhs = rhs;
    return c;
  };
  auto term = [](Constraint& c, long var, double coef) {
    c.index.push_back(static_cast<int>(var));
    c.value.push_back(coef);
  };

  // gst
  for (int t = 0; t < h; ++t) {
    for (int e = 0; e < te; ++e) {
      auto c = row_of(Relation::kLessEqual, 0.0);
      term(c, vi.fhat(t, e), 1.0);
      term(c, vi.xhat(e), -1.0);
      emit(RowFamily::kGst, std::move(c));
    }
  }
  for (int t = 0; t < h; ++t) {
    for (int v = 1; v < tree.num_nodes(); ++v) {
      if (tree.in_group(t, v)) continue;
      auto c = row_of(Relation::kEqual, 0.0);
      term(c, vi.fhat(t, tree.edge_into(v)), 1.0);
      for (int child : tree.child_edges(v)) term(c, vi.fhat(t, child), -1.0);
      emit(RowFamily::kGst, std::move(c));
    }
  }
  for (int t = 0; t < h; ++t) {
    auto c = row_of(Relation::kGreaterEqual, 2.0);
    for (int v : tree.group(t)) term(c, vi.fhat(t, tree.edge_into(v)), 1.0);
    emit(RowFamily::kGst, std::move(c));
  }

  // Shared shape of the cong and div path-flow rows for one tree edge:
  // `var(e)` is the flow column, `value` the column the outflow must match.
  auto path_flow_rows = [&](RowFamily fam, int tree_edge, auto&& var, long value) {
    const VertexId u = tree.label_of_edge_tail(tree_edge);
    const VertexId v = tree.label_of_edge_head(tree_edge);
    auto out = row_of(Relation::kEqual, 0.0);
    for (EdgeId e : g.out_edges(u)) term(out, var(e), 1.0);
    term(out, value, -1.0);
    emit(fam, std::move(out));
    if (!g.in_edges(u).empty()) {
      auto in = row_of(Relation::kEqual, 0.0);
      for (EdgeId e : g.in_edges(u)) term(in, var(e), 1.0);
      emit(fam, std::move(in));
    }
    for (VertexId w = 0; w < n; ++w) {
      if (w == u || w == v) continue;
      if (g.in_edges(w).empty() && g.out_edges(w).empty()) continue;
      auto c = row_of(Relation::kEqual, 0.0);
      for (EdgeId e : g.in_edges(w)) term(c, var(e), 1.0);
      for (EdgeId e : g.out_edges(w)) term(c, var(e), -1.0);
      emit(fam, std::move(c));
    }
  };

  // cong
  for (int k = 0; k < te; ++k) {
    for (int e = 0; e < m; ++e) {
      auto c = row_of(Relation::kLessEqual, 0.0);
      term(c, vi.f(k, e), 1.0);
      term(c, vi.x(e), -1.0);
      emit(RowFamily::kCong, std::move(c));
    }
  }
  for (int k = 0; k < te; ++k)
    path_flow_rows(RowFamily::kCong, k, [&](EdgeId e) { return vi.f(k, e); }, vi.xhat(k));
  for (int e = 0; e < m; ++e) {
    auto c = row_of(Relation::kLessEqual, 0.0);
    for (int k = 0; k < te; ++k) term(c, vi.f(k, e), 1.0);
    term(c, vi.x(e), -beta);
    emit(RowFamily::kCong, std::move(c));
  }

  if (!options.include_div) return model;

  // div
  for (int t = 0; t < h; ++t) {
    for (int k = 0; k < te; ++k) {
      for (int e = 0; e < m; ++e) {
        auto c = row_of(Relation::kLessEqual, 0.0);
        term(c, vi.ft(t, k, e), 1.0);
        term(c, vi.f(k, e), -1.0);
        emit(RowFamily::kDiv, std::move(c));
      }
    }
  }
  for (int t = 0; t < h; ++t)
    for (int k = 0; k < te; ++k)
      path_flow_rows(RowFamily::kDiv, k, [&](EdgeId e) { return vi.ft(t, k, e); }, vi.fhat(t, k));
  for (int e = 0; e < m; ++e) {
    for (int t = 0; t < h; ++t) {
      auto c = row_of(Relation::kLessEqual, 0.0);
      for (int k = 0; k < te; ++k) term(c, vi.ft(t, k, e), 1.0);
      term(c, vi.x(e), -1.0);
      emit(RowFamily::kDiv, std::move(c));
    }
  }
  return model;
}

/// Fractional optimum of an LpModel, addressable by structured key.
struct LpSolution {
  SolveStatus status = SolveStatus::kIterationLimit;
  std::vector<double> values;
  double objective = 0.0;
  long iterations = 0;
  InfeasibilityCertificate certificate;

  bool optimal() const { return status == SolveStatus::kOptimal; }
  double operator[](long index) const { return values.at(index); }
};

inline LpSolution solve_model(const LpModel& model, const SolverConfig& config = {}) {
  const auto r = solve_lp(model.program, config);
  return {r.status, r.x, r.objective, r.iterations, r.certificate};
}

/// Among the optimal points of `model`, finds one carrying the least total
/// map flow (sum of f and f^t). Optimal LP points may route zero-cost
/// circulations through edges with spare x_e, and the analysis of the
/// rounding assumes the map flows have none. The objective is pinned at
/// the first-stage value up to a relative 1e-9.
inline LpSolution tidy_flows(const LpModel& model, const LpSolution& first, const SolverConfig& config = {}) {
  if (!first.optimal()) return first;
  const auto& vi = model.index;
  LinearProgram lp = model.program;
  Constraint pin;
  for (int e = 0; e < vi.num_edges(); ++e) {
    if (lp.cost[vi.x(e)] == 0.0) continue;
    pin.index.push_back(vi.x(e));
    pin.value.push_back(lp.cost[vi.x(e)]);
  }
  pin.relation = Relation::kLessEqual;
  pin.rhs = first.objective + 1e-9 * std::max(1.0, std::abs(first.objective));
  lp.add_row(std::move(pin));
  std::fill(lp.cost.begin(), lp.cost.end(), 0.0);
  for (long j = vi.f(0, 0); j < vi.size(); ++j) lp.cost[j] = 1.0;
  const auto r = solve_lp(lp, config);
  if (r.status != SolveStatus::kOptimal) return first;
  LpSolution out{r.status, r.x, model.program.objective(r.x), first.iterations + r.iterations, {}};
  return out;
}

struct ReplayReport {
  double max_violation = 0.0;
  int worst_row = -1;  // -1 with family kBounds means a column bound
  RowFamily worst_family = RowFamily::kBounds;
  double objective = 0.0;

  bool ok(double tol) const { return max_violation <= tol; }
};

// Re-evaluates every row and bound against `values`; independent of the
// solver's internal state.
inline ReplayReport replay_constraints(const LpModel& model, const std::vector<double>& values) {
  if (static_cast<long>(values.size()) != model.num_vars()) throw ArgumentError("solution size mismatch");
  ReplayReport rep;
  const auto& lp = model.program;
  for (int j = 0; j < lp.num_vars(); ++j) {
    const double v = std::max(lp.lower[j] - values[j], values[j] - lp.upper[j]);
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_row = -1;
      rep.worst_family = RowFamily::kBounds;
    }
  }
  for (int i = 0; i < lp.num_rows(); ++i) {
    const double v = lp.rows[i].violation(values);
    if (v > rep.max_violation) {
      rep.max_violation = v;
      rep.worst_row = i;
      rep.worst_family = model.family[i];
    }
  }
  rep.objective = lp.objective(values);
  return rep;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Writes the model in CPLEX LP text format. Output depends only on the
/// model, so repeated exports are byte-identical.
inline std::string export_lp(const LpModel& model) {
  const auto& lp = model.program;
  const auto& vi = model.index;
  std::ostringstream os;
  os << "\\ LP relaxation for 2-connected directed Steiner tree\n";
  os << "\\ variables: " << lp.num_vars() << " constraints: " << lp.num_rows() << " beta: "
     << detail::format_number(model.beta) << "\n";
  auto write_terms = [&](const std::vector<int>& idx, const std::vector<double>& val) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const double c = val[k];
      if (k > 0 && k % 8 == 0) os << "\n  ";
      os << (c < 0 ? " - " : (k == 0 ? " " : " + ")) << detail::format_number(std::abs(c)) << ' '
         << vi.name(idx[k]);
    }
  };
  os << "Minimize\n obj:";
  std::vector<int> oi;
  std::vector<double> ov;
  for (int j = 0; j < lp.num_vars(); ++j) {
    if (lp.cost[j] != 0.0 || j < vi.num_edges()) {
      oi.push_back(j);
      ov.push_back(lp.cost[j]);
    }
  }
  write_terms(oi, ov);
  os << "\nSubject To\n";
  std::vector<int> counter(4, 0);
  for (int i = 0; i < lp.num_rows(); ++i) {
    const auto& r = lp.rows[i];
    const auto fam = model.family[i];
    os << ' ' << family_name(fam) << '_' << counter[static_cast<int>(fam)]++ << ':';
    write_terms(r.index, r.value);
    os << ' ' << relation_symbol(r.relation) << ' ' << detail::format_number(r.rhs) << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j)
    os << ' ' << detail::format_number(lp.lower[j]) << " <= " << vi.name(j) << " <= "
       << detail::format_number(lp.upper[j]) << '\n';
  os << "End\n";
  return os.str();
}

/// A parsed LP file: the program plus column names in first-seen order.
struct ImportedLp {
  LinearProgram program;
  std::vector<std::string> names;
  std::vector<std::string> row_names;
};

/// Reads the CPLEX LP subset written by export_lp (plus Maximize, free
/// bounds and one-sided bounds). Columns default to [0, +inf).
inline ImportedLp import_lp(std::string_view text) {
  ImportedLp out;
  std::unordered_map<std::string, int> col;
  auto column = [&](const std::string& name) {
    auto it = col.find(name);
    if (it != col.end()) return it->second;
    const int j = out.program.add_variable(0.0, 0.0, std::numeric_limits<double>::infinity());
    col.emplace(name, j);
    out.names.push_back(name);
    return j;
  };

  // Tokenise, dropping comments; remember the line of each token.
  struct Token {
    std::string text;
    std::size_t line;
  };
  std::vector<Token> tokens;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    std::size_t i = 0;
    while (i < line.size()) {
      const char ch = line[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      if (ch == '<' || ch == '>' || ch == '=') {
        std::string op(1, ch);
        if (i + 1 < line.size() && line[i + 1] == '=') {
          op += '=';
          ++i;
        }
        if (op == "=<") op = "<=";
        if (op == "=>") op = ">=";
        tokens.push_back({op, line_no});
        ++i;
        continue;
      }
      if (ch == '+' || ch == '-' || ch == ':') {
        tokens.push_back({std::string(1, ch), line_no});
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
             std::string_view("<>=+-:").find(line[j]) == std::string_view::npos) {
        // exponent sign inside a number, e.g. 1e-05
        if ((line[j] == 'e' || line[j] == 'E') && j + 1 < line.size() && (line[j + 1] == '-' || line[j + 1] == '+') &&
            j > i && (std::isdigit(static_cast<unsigned char>(line[i])) || line[i] == '.')) {
          j += 2;
          continue;
        }
        ++j;
      }
      tokens.push_back({line.substr(i, j - i), line_no});
      i = j;
    }
  }

  auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  auto is_number = [](const std::string& s, double& v) {
    if (s.empty()) return false;
    const char c = s[0];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) {
      const auto l = s;
      if (l == "inf" || l == "infinity" || l == "Inf" || l == "Infinity") {
        v = std::numeric_limits<double>::infinity();
        return true;
      }
      return false;
    }
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
  };

  enum class Section { kNone, kObjective, kConstraints, kBounds, kEnd };
  Section section = Section::kNone;
  bool maximize = false;
  std::size_t p = 0;

  auto section_keyword = [&](std::size_t at, std::size_t& consumed) -> std::optional<Section> {
    const auto w = lower(tokens[at].text);
    consumed = 1;
    if (w == "minimize" || w == "minimise" || w == "min") return Section::kObjective;
    if (w == "maximize" || w == "maximise" || w == "max") {
      maximize = true;
      return Section::kObjective;
    }
    if (w == "subject" && at + 1 < tokens.size() && lower(tokens[at + 1].text) == "to") {
      consumed = 2;
      return Section::kConstraints;
    }
    if (w == "st" || w == "s.t.") return Section::kConstraints;
    if (w == "bounds" || w == "bound") return Section::kBounds;
    if (w == "end") return Section::kEnd;
    return std::nullopt;
  };

  // Parses "[name :] [+-] [coef] var ..." until a relation token or a
  // section keyword; returns the linear expression.
  auto parse_expression = [&](std::vector<int>& idx, std::vector<double>& val, std::string& name) {
    name.clear();
    if (p + 1 < tokens.size() && tokens[p + 1].text == ":") {
      name = tokens[p].text;
      p += 2;
    }
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    while (p < tokens.size()) {
      const auto& tk = tokens[p].text;
      std::size_t consumed = 0;
      if (tk == "<=" || tk == ">=" || tk == "=" || tk == "<" || tk == ">") break;
      if (section_keyword(p, consumed)) break;
      if (tk == "+") {
        ++p;
        continue;
      }
      if (tk == "-") {
        sign = -sign;
        ++p;
        continue;
      }
      double v;
      if (is_number(tk, v)) {
        coef *= v;
        have_coef = true;
        ++p;
        continue;
      }
      const int j = column(tk);
      idx.push_back(j);
      val.push_back(sign * (have_coef ? coef : 1.0));
      sign = 1.0;
      coef = 1.0;
      have_coef = false;
      ++p;
    }
    if (have_coef) throw FormatError("dangling coefficient in LP expression", tokens[p - 1].line);
  };

  while (p < tokens.size() && section != Section::kEnd) {
    std::size_t consumed = 0;
    if (auto s = section_keyword(p, consumed)) {
      section = *s;
      p += consumed;
      if (section == Section::kObjective) {
        std::vector<int> idx;
        std::vector<double> val;
        std::string name;
        parse_expression(idx, val, name);
        for (std::size_t k = 0; k < idx.size(); ++k) out.program.cost[idx[k]] += maximize ? -val[k] : val[k];
      }
      continue;
    }
    if (section == Section::kConstraints) {
      Constraint c;
      std::string name;
      parse_expression(c.index, c.value, name);
      if (p >= tokens.size()) throw FormatError("constraint without relation", tokens.back().line);
      const auto op = tokens[p++].text;
      c.relation = op == "=" ? Relation::kEqual : (op[0] == '<' ? Relation::kLessEqual : Relation::kGreaterEqual);
      double sign = 1.0;
      if (p < tokens.size() && (tokens[p].text == "-" || tokens[p].text == "+")) {
        sign = tokens[p].text == "-" ? -1.0 : 1.0;
        ++p;
      }
      double v;
      if (p >= tokens.size() || !is_number(tokens[p].text, v))
        throw FormatError("expected right-hand side", p < tokens.size() ? tokens[p].line : 0);
      c.rhs = sign * v;
      ++p;
      out.program.rows.push_back(std::move(c));
      out.row_names.push_back(name);
      continue;
    }
    if (section == Section::kBounds) {
      const std::size_t line_of = tokens[p].line;
      std::vector<std::string> parts;
      while (p < tokens.size() && tokens[p].line == line_of) parts.push_back(tokens[p++].text);
      // Merge unary minus into the following number.
      std::vector<std::string> merged;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if ((parts[k] == "-" || parts[k] == "+") && k + 1 < parts.size()) {
          double v;
          if (is_number(parts[k + 1], v)) {
            merged.push_back(parts[k] == "-" ? "-" + parts[k + 1] : parts[k + 1]);
            ++k;
            continue;
          }
        }
        merged.push_back(parts[k]);
      }
      auto num = [&](const std::string& s) {
        double v;
        const bool neg = !s.empty() && s[0] == '-';
        if (!is_number(neg ? s.substr(1) : s, v)) throw FormatError("bad bound value '" + s + "'", line_of);
        return neg ? -v : v;
      };
      auto& lo = out.program.lower;
      auto& hi = out.program.upper;
      if (merged.size() == 2 && lower(merged[1]) == "free") {
        const int j = column(merged[0]);
        lo[j] = -std::numeric_limits<double>::infinity();
        hi[j] = std::numeric_limits<double>::infinity();
      } else if (merged.size() == 5 && merged[1] == "<=" && merged[3] == "<=") {
        const int j = column(merged[2]);
        lo[j] = num(merged[0]);
        hi[j] = num(merged[4]);
      } else if (merged.size() == 3) {
        double v;
        const bool first_is_num = is_number(merged[0][0] == '-' ? merged[0].substr(1) : merged[0], v);
        const int j = column(first_is_num ? merged[2] : merged[0]);
        const double b = num(first_is_num ? merged[0] : merged[2]);
        std::string op = merged[1];
        if (first_is_num && op != "=") op = op == "<=" ? ">=" : "<=";
        if (op == "=") {
          lo[j] = hi[j] = b;
        } else if (op == "<=") {
          hi[j] = b;
        } else {
          lo[j] = b;
        }
      } else {
        throw FormatError("unrecognised bound line", line_of);
      }
      continue;
    }
    throw FormatError("unexpected token '" + tokens[p].text + "'", tokens[p].line);
  }
  return out;
}

}  // namespace dst2
