#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dst2/lp_model.hpp"
#include "dst2/reductions.hpp"
#include "dst2/solution.hpp"

namespace dst2 {

using Json = nlohmann::json;

// Instance files come in two encodings. JSON:
//   {"vertices": [names], "edges": [{"tail","head","cost"}], "root": name, "terminals": [names]}
// and a line format with integer vertices 0..n-1:
//   p 2dst n m / e tail head cost / r root / t terminal
// Lines starting with 'c' or '#' are comments. Pairwise (DSS) instances use
// "p 2dss" and have no root line; their JSON omits "root".

namespace detail {

inline bool looks_like_json(std::string_view text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{';
  }
  return false;
}

inline VertexId vertex_by_name(const DirectedMultigraph& g, const std::string& name) {
  const auto v = g.find_vertex(name);
  if (!v) throw FormatError("unknown vertex '" + name + "'", 0);
  return *v;
}

struct ParsedGraph {
  DirectedMultigraph graph;
  std::optional<VertexId> root;
  std::vector<VertexId> terminals;
  std::string kind;
};

inline ParsedGraph parse_json_graph(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), 0);
  }
  ParsedGraph p;
  p.kind = j.contains("root") ? "2dst" : "2dss";
  try {
    for (const auto& v : j.at("vertices")) p.graph.add_vertex(v.get<std::string>());
    for (const auto& e : j.at("edges"))
      p.graph.add_edge(vertex_by_name(p.graph, e.at("tail").get<std::string>()),
                       vertex_by_name(p.graph, e.at("head").get<std::string>()), e.at("cost").get<double>());
    if (j.contains("root")) p.root = vertex_by_name(p.graph, j.at("root").get<std::string>());
    for (const auto& t : j.at("terminals")) p.terminals.push_back(vertex_by_name(p.graph, t.get<std::string>()));
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed instance: ") + e.what(), 0);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what(), 0);
  }
  return p;
}

inline ParsedGraph parse_text_graph(std::string_view text) {
  ParsedGraph p;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  long declared_m = -1;
  auto vertex = [&](long v) {
    if (v < 0 || v >= p.graph.num_vertices()) throw FormatError("vertex out of range", line_no);
    return static_cast<VertexId>(v);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == 'c' || tag[0] == '#') continue;
    auto fail = [&] { throw FormatError("cannot parse '" + line + "'", line_no); };
    if (tag == "p") {
      long n = 0;
      if (!p.kind.empty() || !(ls >> p.kind >> n >> declared_m) || n < 0 || declared_m < 0) fail();
      if (p.kind != "2dst" && p.kind != "2dss") fail();
      for (long v = 0; v < n; ++v) p.graph.add_vertex(std::to_string(v));
      continue;
    }
    if (p.kind.empty()) throw FormatError("missing 'p' header", line_no);
    long a = 0, b = 0;
    double c = 0.0;
    try {
      if (tag == "e") {
        if (!(ls >> a >> b >> c)) fail();
        p.graph.add_edge(vertex(a), vertex(b), c);
      } else if (tag == "r") {
        if (!(ls >> a) || p.root) fail();
        p.root = vertex(a);
      } else if (tag == "t") {
        if (!(ls >> a)) fail();
        p.terminals.push_back(vertex(a));
      } else {
        fail();
      }
    } catch (const ArgumentError& e) {
      throw FormatError(e.what(), line_no);
    }
    std::string extra;
    if (ls >> extra) fail();
  }
  if (p.kind.empty()) throw FormatError("missing 'p' header", line_no);
  if (p.graph.num_edges() != declared_m) throw FormatError("edge count differs from header", line_no);
  return p;
}

inline ParsedGraph parse_graph(std::string_view text) {
  return looks_like_json(text) ? parse_json_graph(text) : parse_text_graph(text);
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline DstInstance parse_instance(std::string_view text) {
  auto p = detail::parse_graph(text);
  if (!p.root) throw FormatError("instance has no root", 0);
  DstInstance inst{std::move(p.graph), *p.root, std::move(p.terminals)};
  try {
    inst.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(e.what(), 0);
  }
  return inst;
}

inline DssInstance parse_dss_instance(std::string_view text) {
  auto p = detail::parse_graph(text);
  if (p.root) throw FormatError("pairwise instance must not name a root", 0);
  DssInstance inst{std::move(p.graph), std::move(p.terminals)};
  try {
    inst.validate();
  } catch (const ArgumentError& e) {
    throw FormatError(e.what(), 0);
  }
  return inst;
}

inline DstInstance load_instance(const std::string& path) { return parse_instance(read_file(path)); }
inline DssInstance load_dss_instance(const std::string& path) { return parse_dss_instance(read_file(path)); }

namespace detail {

inline Json graph_json(const DirectedMultigraph& g) {
  Json j;
  j["vertices"] = Json::array();
  for (VertexId v = 0; v < g.num_vertices(); ++v) j["vertices"].push_back(g.name(v));
  j["edges"] = Json::array();
  for (const auto& e : g.edges())
    j["edges"].push_back({{"tail", g.name(e.tail)}, {"head", g.name(e.head)}, {"cost", e.cost}});
  return j;
}

}  // namespace detail

inline Json instance_json(const DstInstance& inst) {
  Json j = detail::graph_json(inst.graph);
  j["root"] = inst.graph.name(inst.root);
  j["terminals"] = Json::array();
  for (VertexId t : inst.terminals) j["terminals"].push_back(inst.graph.name(t));
  return j;
}

inline Json instance_json(const DssInstance& inst) {
  Json j = detail::graph_json(inst.graph);
  j["terminals"] = Json::array();
  for (VertexId t : inst.terminals) j["terminals"].push_back(inst.graph.name(t));
  return j;
}

namespace detail {

inline std::string format_cost(double c) {
  std::ostringstream ss;
  ss.precision(17);
  ss << c;
  return ss.str();
}

inline void text_edges(std::ostringstream& ss, const DirectedMultigraph& g) {
  for (const auto& e : g.edges()) ss << "e " << e.tail << ' ' << e.head << ' ' << format_cost(e.cost) << '\n';
}

}  // namespace detail

// Line format; vertex names are replaced by their ids.
inline std::string instance_text(const DstInstance& inst) {
  std::ostringstream ss;
  ss << "p 2dst " << inst.graph.num_vertices() << ' ' << inst.graph.num_edges() << '\n';
  detail::text_edges(ss, inst.graph);
  ss << "r " << inst.root << '\n';
  for (VertexId t : inst.terminals) ss << "t " << t << '\n';
  return ss.str();
}

inline std::string instance_text(const DssInstance& inst) {
  std::ostringstream ss;
  ss << "p 2dss " << inst.graph.num_vertices() << ' ' << inst.graph.num_edges() << '\n';
  detail::text_edges(ss, inst.graph);
  for (VertexId t : inst.terminals) ss << "t " << t << '\n';
  return ss.str();
}

inline Json report_json(const FeasibilityReport& rep, const DirectedMultigraph& g,
                        std::span<const VertexId> terminals) {
  Json j;
  j["feasible"] = rep.feasible;
  j["flows"] = Json::object();
  for (std::size_t i = 0; i < terminals.size() && i < rep.flows.size(); ++i)
    j["flows"][g.name(terminals[i])] = rep.flows[i];
  if (rep.witness) {
    j["witness"] = {{"edge", rep.witness->edge},
                    {"terminal", g.name(rep.witness->terminal)},
                    {"cut", rep.witness->cut}};
  }
  return j;
}

/// Solution dump: edges with provenance, cost, and the verdict if present.
inline Json solution_json(const SolutionSubgraph& sol, const DirectedMultigraph& g,
                          std::span<const VertexId> terminals = {}) {
  Json j;
  j["cost"] = sol.cost;
  j["pruned"] = sol.pruned;
  j["edges"] = Json::array();
  for (EdgeId e : sol.edges) {
    const auto& ed = g.edge(e);
    Json je{{"id", e}, {"tail", g.name(ed.tail)}, {"head", g.name(ed.head)}, {"cost", ed.cost}};
    if (auto it = sol.provenance.find(e); it != sol.provenance.end())
      je["provenance"] = {{"iteration", it->second.iteration},
                          {"tree_edge", it->second.tree_edge},
                          {"sample", it->second.sample}};
    j["edges"].push_back(std::move(je));
  }
  if (sol.report) j["report"] = report_json(*sol.report, g, terminals);
  return j;
}

// Accepts a solution dump or a bare array of edge ids.
inline SolutionSubgraph parse_solution(std::string_view text, const DirectedMultigraph& g) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), 0);
  }
  const Json& list = j.is_array() ? j : j.at("edges");
  std::vector<EdgeId> ids;
  try {
    for (const auto& e : list) ids.push_back(e.is_number() ? e.get<EdgeId>() : e.at("id").get<EdgeId>());
    return SolutionSubgraph::from_edges(g, ids);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed solution: ") + e.what(), 0);
  } catch (const ArgumentError& e) {
    throw FormatError(e.what(), 0);
  }
}

/// LP solution dump: status, objective and every nonzero column by name.
inline Json lp_solution_json(const LpModel& model, const LpSolution& sol) {
  Json j;
  j["status"] = status_name(sol.status);
  j["objective"] = sol.objective;
  j["beta"] = model.beta;
  j["values"] = Json::object();
  for (long k = 0; k < static_cast<long>(sol.values.size()); ++k)
    if (sol.values[k] != 0.0) j["values"][model.index.name(k)] = sol.values[k];
  return j;
}

/// Reads an externally produced LP solution in the dump format. Columns not
/// named are zero; the objective is recomputed from the values.
inline LpSolution parse_lp_solution(std::string_view text, const LpModel& model) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what(), 0);
  }
  LpSolution sol;
  sol.values.assign(model.num_vars(), 0.0);
  try {
    const auto status = j.value("status", std::string("optimal"));
    sol.status = status == "optimal" ? SolveStatus::kOptimal
                 : status == "infeasible" ? SolveStatus::kInfeasible
                 : status == "unbounded" ? SolveStatus::kUnbounded
                                          : SolveStatus::kIterationLimit;
    for (const auto& [name, value] : j.at("values").items()) {
      const auto k = model.index.parse_name(name);
      if (!k) throw FormatError("unknown LP column '" + name + "'", 0);
      sol.values[*k] = value.get<double>();
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed LP solution: ") + e.what(), 0);
  }
  sol.objective = model.program.objective(sol.values);
  return sol;
}

}  // namespace dst2
