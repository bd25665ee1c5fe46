#pragma once

// Topology matrices, directed message conflict graphs and the structural
// transforms used throughout the solver (complement, node splitting,
// undirected projection).
//
// Node ids are 0-based internally. Everything that crosses a file or CLI
// boundary is 1-based; see io.hpp.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Node = int;
using Edge = std::pair<Node, Node>;

/// K x K 0/1 connectivity. entry(j, i) == 1 iff source i reaches destination j.
class TopologyMatrix {
 public:
  TopologyMatrix() = default;

  TopologyMatrix(std::vector<std::vector<int>> rows, int m = 1, int n = 1)
      : k_(static_cast<int>(rows.size())), m_(m), n_(n) {
    if (m_ < 1 || n_ < 1) throw Error("antenna counts must be >= 1");
    entries_.reserve(static_cast<std::size_t>(k_) * k_);
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != k_) throw Error("topology matrix must be square");
      for (int v : row) {
        if (v != 0 && v != 1) throw Error("topology entries must be 0 or 1");
        entries_.push_back(static_cast<char>(v));
      }
    }
  }

  static TopologyMatrix identity(int k) {
    std::vector<std::vector<int>> rows(k, std::vector<int>(k, 0));
    for (int i = 0; i < k; ++i) rows[i][i] = 1;
    return TopologyMatrix(std::move(rows));
  }

  int k() const { return k_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int operator()(int dest, int src) const { return entries_[static_cast<std::size_t>(dest) * k_ + src]; }

  bool diagonal_complete() const {
    for (int j = 0; j < k_; ++j)
      if (!(*this)(j, j)) return false;
    return true;
  }

  int off_diagonal_ones() const {
    int count = 0;
    for (int j = 0; j < k_; ++j)
      for (int i = 0; i < k_; ++i)
        if (i != j && (*this)(j, i)) ++count;
    return count;
  }

  std::vector<std::vector<int>> rows() const {
    std::vector<std::vector<int>> out(k_, std::vector<int>(k_));
    for (int j = 0; j < k_; ++j)
      for (int i = 0; i < k_; ++i) out[j][i] = (*this)(j, i);
    return out;
  }

 private:
  int k_ = 0;
  int m_ = 1;
  int n_ = 1;
  std::vector<char> entries_;
};

/// Simple undirected graph over 0..n-1, adjacency lists kept sorted.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(int n) : n_(n), adj_(static_cast<std::size_t>(n) * n, 0), nbrs_(n) {}

  void add_edge(int u, int v) {
    if (u == v || has_edge(u, v)) return;
    adj_[idx(u, v)] = adj_[idx(v, u)] = 1;
    nbrs_[u].insert(std::upper_bound(nbrs_[u].begin(), nbrs_[u].end(), v), v);
    nbrs_[v].insert(std::upper_bound(nbrs_[v].begin(), nbrs_[v].end(), u), u);
    ++m_;
  }

  int size() const { return n_; }
  int edge_count() const { return m_; }
  bool has_edge(int u, int v) const { return adj_[idx(u, v)] != 0; }
  const std::vector<int>& neighbors(int v) const { return nbrs_[v]; }
  int degree(int v) const { return static_cast<int>(nbrs_[v].size()); }

  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < n_; ++u)
      for (int v : nbrs_[u])
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool operator==(const UndirectedGraph& o) const { return n_ == o.n_ && adj_ == o.adj_; }

 private:
  std::size_t idx(int u, int v) const { return static_cast<std::size_t>(u) * n_ + v; }

  int n_ = 0;
  int m_ = 0;
  std::vector<char> adj_;
  std::vector<std::vector<int>> nbrs_;
};

/// Directed message conflict graph. Edge (i, j): source i interferes destination j.
class ConflictGraph {
 public:
  ConflictGraph() = default;
  explicit ConflictGraph(int k) : k_(k), adj_(static_cast<std::size_t>(k) * k, 0), in_(k), out_(k) {}

  ConflictGraph(int k, const std::vector<Edge>& edges) : ConflictGraph(k) {
    for (auto [i, j] : edges) add_edge(i, j);
  }

  void add_edge(Node i, Node j) {
    check(i);
    check(j);
    if (i == j) throw Error("conflict graph cannot contain self-loops");
    if (has_edge(i, j)) return;
    adj_[idx(i, j)] = 1;
    out_[i].insert(std::upper_bound(out_[i].begin(), out_[i].end(), j), j);
    in_[j].insert(std::upper_bound(in_[j].begin(), in_[j].end(), i), i);
    ++m_;
  }

  int size() const { return k_; }
  int edge_count() const { return m_; }
  bool has_edge(Node i, Node j) const { return adj_[idx(i, j)] != 0; }
  bool adjacent(Node i, Node j) const { return has_edge(i, j) || has_edge(j, i); }

  const std::vector<Node>& in_neighbors(Node j) const { return in_[j]; }
  const std::vector<Node>& out_neighbors(Node i) const { return out_[i]; }
  int in_degree(Node j) const { return static_cast<int>(in_[j].size()); }

  /// Sorted N+(j), or N+(j) plus j when `closed`.
  std::vector<Node> in_neighborhood(Node j, bool closed) const {
    check(j);
    std::vector<Node> out = in_[j];
    if (closed) out.insert(std::upper_bound(out.begin(), out.end(), j), j);
    return out;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (int i = 0; i < k_; ++i)
      for (int j : out_[i]) out.emplace_back(i, j);
    return out;
  }

  ConflictGraph reversed() const {
    ConflictGraph r(k_);
    for (auto [i, j] : edges()) r.add_edge(j, i);
    return r;
  }

  ConflictGraph induced(const std::vector<Node>& keep) const {
    std::vector<int> pos(k_, -1);
    for (std::size_t a = 0; a < keep.size(); ++a) pos[keep[a]] = static_cast<int>(a);
    ConflictGraph sub(static_cast<int>(keep.size()));
    for (auto [i, j] : edges())
      if (pos[i] >= 0 && pos[j] >= 0) sub.add_edge(pos[i], pos[j]);
    return sub;
  }

  bool operator==(const ConflictGraph& o) const { return k_ == o.k_ && adj_ == o.adj_; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * k_ + j; }
  void check(Node v) const {
    if (v < 0 || v >= k_) throw Error("unknown node id " + std::to_string(v + 1));
  }

  int k_ = 0;
  int m_ = 0;
  std::vector<char> adj_;
  std::vector<std::vector<Node>> in_;
  std::vector<std::vector<Node>> out_;
};

inline ConflictGraph build_conflict_graph(const TopologyMatrix& t) {
  if (!t.diagonal_complete()) throw Error("topology matrix has a zero diagonal entry (demanded link missing)");
  ConflictGraph g(t.k());
  for (int j = 0; j < t.k(); ++j)
    for (int i = 0; i < t.k(); ++i)
      if (i != j && t(j, i)) g.add_edge(i, j);
  return g;
}

inline TopologyMatrix to_topology(const ConflictGraph& g, int m = 1, int n = 1) {
  std::vector<std::vector<int>> rows(g.size(), std::vector<int>(g.size(), 0));
  for (int j = 0; j < g.size(); ++j) rows[j][j] = 1;
  for (auto [i, j] : g.edges()) rows[j][i] = 1;
  return TopologyMatrix(std::move(rows), m, n);
}

inline ConflictGraph complement(const ConflictGraph& g) {
  ConflictGraph c(g.size());
  for (int i = 0; i < g.size(); ++i)
    for (int j = 0; j < g.size(); ++j)
      if (i != j && !g.has_edge(i, j)) c.add_edge(i, j);
  return c;
}

inline UndirectedGraph underlying_undirected(const ConflictGraph& g) {
  UndirectedGraph u(g.size());
  for (auto [i, j] : g.edges()) u.add_edge(i, j);
  return u;
}

/// b-order node splitting. Split node (v, r) has id v * b + r, r in 0..b-1;
/// back_map carries the base node explicitly.
struct SplitGraph {
  ConflictGraph graph;
  int base_size = 0;
  int b = 1;
  std::vector<Node> back_map;
  std::vector<int> copy_index;

  Node split_id(Node v, int r) const { return v * b + r; }
};

inline SplitGraph node_split(const ConflictGraph& g, int b) {
  if (b < 1) throw Error("split order must be >= 1");
  SplitGraph sg;
  sg.base_size = g.size();
  sg.b = b;
  sg.graph = ConflictGraph(g.size() * b);
  sg.back_map.resize(g.size() * b);
  sg.copy_index.resize(g.size() * b);
  for (int v = 0; v < g.size(); ++v)
    for (int r = 0; r < b; ++r) {
      sg.back_map[v * b + r] = v;
      sg.copy_index[v * b + r] = r;
    }
  for (auto [u, v] : g.edges())
    for (int r = 0; r < b; ++r)
      for (int s = 0; s < b; ++s) sg.graph.add_edge(u * b + r, v * b + s);
  for (int v = 0; v < g.size(); ++v)
    for (int r = 0; r < b; ++r)
      for (int s = 0; s < b; ++s)
        if (r != s) sg.graph.add_edge(v * b + r, v * b + s);
  return sg;
}

/// Collects the b split-node values of each base node, copy index ascending.
template <class T>
std::vector<std::vector<T>> merge_split_assignment(const SplitGraph& sg, const std::map<Node, T>& split_assign) {
  std::vector<std::vector<T>> merged(sg.base_size, std::vector<T>(sg.b));
  for (int s = 0; s < sg.graph.size(); ++s) {
    auto it = split_assign.find(s);
    if (it == split_assign.end())
      throw Error("split node (" + std::to_string(sg.back_map[s] + 1) + ", " + std::to_string(sg.copy_index[s] + 1) +
                  ") is unassigned");
    merged[sg.back_map[s]][sg.copy_index[s]] = it->second;
  }
  return merged;
}

template <class T>
std::vector<std::vector<T>> merge_split_assignment(const SplitGraph& sg, const std::vector<T>& split_assign) {
  if (static_cast<int>(split_assign.size()) != sg.graph.size()) throw Error("split assignment size mismatch");
  std::map<Node, T> m;
  for (int s = 0; s < sg.graph.size(); ++s) m.emplace(s, split_assign[s]);
  return merge_split_assignment(sg, m);
}

/// True iff the subgraph induced on `nodes` has no directed cycle (Kahn's algorithm).
inline bool is_acyclic_induced(const ConflictGraph& g, const std::vector<Node>& nodes) {
  std::vector<char> in_set(g.size(), 0);
  for (Node v : nodes) in_set[v] = 1;
  std::vector<int> indeg(g.size(), 0);
  for (Node v : nodes)
    for (Node u : g.in_neighbors(v))
      if (in_set[u]) ++indeg[v];
  std::vector<Node> ready;
  for (Node v : nodes)
    if (indeg[v] == 0) ready.push_back(v);
  std::size_t seen = 0;
  while (!ready.empty()) {
    Node v = ready.back();
    ready.pop_back();
    ++seen;
    for (Node w : g.out_neighbors(v))
      if (in_set[w] && --indeg[w] == 0) ready.push_back(w);
  }
  return seen == nodes.size();
}

}  // namespace tim
