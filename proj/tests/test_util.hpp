#pragma once

#include <random>
#include <set>
#include <vector>

#include "tim/graph.hpp"

namespace tim::test {

inline ConflictGraph random_graph(int k, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  ConflictGraph g(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && coin(rng)) g.add_edge(i, j);
  return g;
}

// 1-based edge literals
inline ConflictGraph graph1(int k, std::initializer_list<std::pair<int, int>> edges) {
  ConflictGraph g(k);
  for (auto [i, j] : edges) g.add_edge(i - 1, j - 1);
  return g;
}

inline ConflictGraph triangle_into_fourth() { return graph1(4, {{1, 2}, {2, 3}, {3, 1}, {1, 4}, {2, 4}, {3, 4}}); }

inline std::set<Edge> edge_set(const ConflictGraph& g) {
  auto e = g.edges();
  return {e.begin(), e.end()};
}

}  // namespace tim::test

namespace tim::test {

// Cycle check by repeated removal of nodes without predecessors, over an adjacency matrix.
inline bool acyclic_oracle(const std::vector<std::vector<bool>>& adj, unsigned mask) {
  const int k = static_cast<int>(adj.size());
  bool removed = true;
  while (removed && mask) {
    removed = false;
    for (int v = 0; v < k; ++v) {
      if (!(mask >> v & 1u)) continue;
      bool has_pred = false;
      for (int u = 0; u < k && !has_pred; ++u)
        if ((mask >> u & 1u) && adj[u][v]) has_pred = true;
      if (!has_pred) {
        mask &= ~(1u << v);
        removed = true;
      }
    }
  }
  return mask == 0;
}

// Max acyclic induced subgraph of the complement by enumerating all subsets; lexicographically
// smallest maximizer.
inline std::pair<int, std::vector<Node>> mais_oracle(const ConflictGraph& g) {
  const int k = g.size();
  std::vector<std::vector<bool>> comp(k, std::vector<bool>(k, false));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) comp[i][j] = i != j && !g.has_edge(i, j);
  int best = 0;
  std::vector<Node> best_set;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const int size = __builtin_popcount(mask);
    if (size < best) continue;
    if (!acyclic_oracle(comp, mask)) continue;
    std::vector<Node> set;
    for (int v = 0; v < k; ++v)
      if (mask >> v & 1u) set.push_back(v);
    if (size > best || set < best_set) {
      best = size;
      best_set = set;
    }
  }
  return {best, best_set};
}

}  // namespace tim::test
