#pragma once

// JSON and DOT serialization. Node ids are 1-based in every file format.

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tim/bounds.hpp"
#include "tim/coloring.hpp"
#include "tim/datasets.hpp"
#include "tim/graph.hpp"
#include "tim/ia.hpp"
#include "tim/lcg_agent.hpp"
#include "tim/lcg_env.hpp"

namespace tim {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j, int indent = 2) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(indent) << "\n";
}

// ---------------------------------------------------------------------------
// Instances.

struct Instance {
  ConflictGraph graph;
  int m = 1;
  int n = 1;
  std::optional<TopologyMatrix> topology;
};

inline json graph_to_json(const ConflictGraph& g) {
  json edges = json::array();
  for (auto [i, j] : g.edges()) edges.push_back({i + 1, j + 1});
  return {{"nodes", g.size()}, {"edges", edges}};
}

inline json topology_to_json(const TopologyMatrix& t) {
  return {{"k", t.k()}, {"topology", t.rows()}, {"m", t.m()}, {"n", t.n()}};
}

inline Instance instance_from_json(const json& j) {
  try {
    Instance inst;
    if (j.contains("topology")) {
      const auto rows = j.at("topology").get<std::vector<std::vector<int>>>();
      inst.m = j.value("m", 1);
      inst.n = j.value("n", 1);
      TopologyMatrix t(rows, inst.m, inst.n);
      if (j.contains("k") && j.at("k").get<int>() != t.k()) throw Error("'k' does not match topology size");
      inst.graph = build_conflict_graph(t);
      inst.topology = std::move(t);
      return inst;
    }
    if (!j.contains("nodes")) throw Error("instance needs 'topology' or 'nodes'");
    const int k = j.at("nodes").get<int>();
    if (k < 0) throw Error("negative node count");
    inst.graph = ConflictGraph(k);
    for (const auto& e : j.value("edges", json::array())) {
      if (!e.is_array() || e.size() != 2) throw Error("edge must be a pair");
      inst.graph.add_edge(e[0].get<int>() - 1, e[1].get<int>() - 1);
    }
    inst.n = j.value("n", 1);
    if (inst.n < 1) throw Error("antenna count must be >= 1");
    return inst;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed instance: ") + e.what());
  }
}

inline Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Schemes, reports, colorings.

inline json scheme_to_json(const CodingScheme& s) {
  json a = json::object();
  for (std::size_t v = 0; v < s.assignment.size(); ++v) {
    json cols = json::array();
    for (const auto& col : s.assignment[v]) {
      json entries = json::array();
      for (const auto& x : col) entries.push_back(static_cast<long long>(x));
      cols.push_back(entries);
    }
    a[std::to_string(v + 1)] = cols;
  }
  return {{"c", s.c}, {"b", s.b}, {"n", s.n}, {"method", method_name(s.method)}, {"assignment", a},
          {"dof", s.dof().str()}};
}

inline CodingScheme scheme_from_json(const json& j, int nodes) {
  try {
    CodingScheme s;
    s.c = j.at("c").get<int>();
    s.b = j.value("b", 1);
    s.n = j.value("n", 1);
    s.method = parse_method(j.value("method", std::string("SSIA")));
    s.assignment.assign(nodes, {});
    for (const auto& [key, cols] : j.at("assignment").items()) {
      const int v = std::stoi(key) - 1;
      if (v < 0 || v >= nodes) throw Error("assignment names unknown node " + key);
      for (const auto& col : cols) {
        IntVector vec;
        for (const auto& x : col) vec.push_back(BigInt(x.get<long long>()));
        s.assignment[v].push_back(std::move(vec));
      }
    }
    if (j.contains("dof") && Rational::parse(j.at("dof").get<std::string>()) != s.dof())
      throw Error("'dof' disagrees with b/c");
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed scheme: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw Error("malformed scheme: non-numeric node key");
  }
}

inline json report_to_json(const VerifyReport& r) {
  json rows = json::array();
  for (const auto& n : r.per_node)
    rows.push_back({{"node", n.node + 1}, {"rank_s", n.rank_s}, {"rank_i", n.rank_i}, {"ok", n.rank_s - n.rank_i == r.b}});
  json failing = json::array();
  for (Node v : r.failing_nodes()) failing.push_back(v + 1);
  return {{"valid", r.valid}, {"dof", r.dof.str()}, {"b", r.b}, {"per_node", rows}, {"failing_nodes", failing}};
}

inline json coloring_to_json(const Coloring& c) {
  json colors = json::object();
  for (std::size_t v = 0; v < c.colors.size(); ++v) colors[std::to_string(v + 1)] = c.colors[v];
  return {{"colors", colors}, {"palette", c.palette_size}, {"local_width", c.local_width}};
}

inline json bound_to_json(const DofBound& b) {
  json w = json::array();
  for (Node v : b.witness) w.push_back(v + 1);
  return {{"mais", b.mais_size}, {"bound", b.bound.str()}, {"witness", w}};
}

inline json step_to_json(const EnvState& before, const std::vector<int>& action, const StepOutcome& out) {
  json act = json::object();
  for (std::size_t v = 0; v < action.size(); ++v)
    if (before.node_state[v] == 0) act[std::to_string(v + 1)] = action[v];
  auto one_based = [](const std::vector<Node>& xs) {
    json a = json::array();
    for (Node v : xs) a.push_back(v + 1);
    return a;
  };
  return {{"t", before.t},
          {"action", act},
          {"rolled_back", one_based(out.rolled_back)},
          {"newly_fixed", one_based(out.newly_fixed)},
          {"reward", out.reward},
          {"done", out.done}};
}

inline json layout_to_json(const WirelessLayout& lay) {
  json tx = json::array(), rx = json::array();
  for (auto p : lay.tx) tx.push_back({p.x, p.y});
  for (auto p : lay.rx) rx.push_back({p.x, p.y});
  return {{"tx", tx}, {"rx", rx}, {"gain", lay.gain}};
}

// ---------------------------------------------------------------------------
// Checkpoints.

inline constexpr int kCheckpointVersion = 1;

inline json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

inline MatrixXd matrix_from_json(const json& j) {
  MatrixXd m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != m.rows()) throw Error("checkpoint matrix row count mismatch");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (static_cast<Eigen::Index>(data[r].size()) != m.cols()) throw Error("checkpoint matrix column count mismatch");
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[r][c].get<double>();
  }
  return m;
}

inline json gnn_to_json(const Gnn& g) {
  json layers = json::array();
  for (int l = 0; l < g.layers(); ++l) layers.push_back({{"w1", matrix_to_json(g.w1[l])}, {"w2", matrix_to_json(g.w2[l])}});
  return layers;
}

inline Gnn gnn_from_json(const json& j) {
  Gnn g;
  for (const auto& layer : j) {
    g.w1.push_back(matrix_from_json(layer.at("w1")));
    g.w2.push_back(matrix_from_json(layer.at("w2")));
  }
  for (int l = 0; l + 1 < g.layers(); ++l)
    if (g.w1[l].cols() != g.w1[l + 1].rows() || g.w1[l].rows() != g.w2[l].rows() || g.w1[l].cols() != g.w2[l].cols())
      throw Error("checkpoint layer widths do not chain");
  return g;
}

inline json checkpoint_to_json(const PolicyParams& p, const json& config = json::object()) {
  return {{"version", kCheckpointVersion}, {"palette", p.palette}, {"hidden", p.hidden},
          {"policy", gnn_to_json(p.policy)},  {"value", gnn_to_json(p.value)},  {"config", config}};
}

inline PolicyParams checkpoint_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != kCheckpointVersion) throw Error("unsupported checkpoint version");
    PolicyParams p;
    p.palette = j.at("palette").get<int>();
    p.hidden = j.at("hidden").get<int>();
    p.policy = gnn_from_json(j.at("policy"));
    p.value = gnn_from_json(j.at("value"));
    if (p.policy.layers() == 0 || p.policy.w1.front().rows() != p.feature_dim() ||
        p.policy.w1.back().cols() != p.actions() || p.value.w1.front().rows() != p.feature_dim() ||
        p.value.w1.back().cols() != 1)
      throw Error("checkpoint shapes do not match its palette");
    return p;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// DOT.

inline std::string vector_label(const IntVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += v[i].str();
  }
  return s + ")";
}

/// Directed DOT rendering; node labels carry the color or the assigned
/// vectors when given.
inline std::string to_dot(const ConflictGraph& g, const CodingScheme* scheme = nullptr,
                          const std::vector<int>* colors = nullptr) {
  std::ostringstream out;
  out << "digraph conflict {\n";
  for (int v = 0; v < g.size(); ++v) {
    std::string label = std::to_string(v + 1);
    if (colors && v < static_cast<int>(colors->size())) label += "\\ncolor " + std::to_string((*colors)[v]);
    if (scheme && v < static_cast<int>(scheme->assignment.size())) {
      label += "\\n";
      for (std::size_t i = 0; i < scheme->assignment[v].size(); ++i)
        label += (i ? " " : "") + vector_label(scheme->assignment[v][i]);
    }
    out << "  " << v + 1 << " [label=\"" << label << "\"];\n";
  }
  for (auto [i, j] : g.edges()) out << "  " << i + 1 << " -> " << j + 1 << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace tim
