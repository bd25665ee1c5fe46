#pragma once

// MAIS outer bound on symmetric DoF and the initial coding-space selector.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "tim/graph.hpp"
#include "tim/rational.hpp"

namespace tim {

inline constexpr int kMaisCap = 30;

struct DofBound {
  int mais_size = 0;
  Rational bound{1, 1};
  std::vector<Node> witness;  // acyclic in complement(g), sorted
};

namespace detail {

using Mask = std::uint64_t;

inline Mask bit(int v) { return Mask{1} << v; }

inline std::vector<Node> mask_nodes(Mask m) {
  std::vector<Node> out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

// Shortest directed cycle of the subgraph induced on `current`, or empty.
inline std::vector<Node> shortest_cycle(const std::vector<Mask>& out, Mask current, int k) {
  std::vector<Node> best;
  std::vector<int> parent(k);
  std::vector<Node> queue;
  queue.reserve(k);
  for (Mask rest = current; rest; rest &= rest - 1) {
    const int s = std::countr_zero(rest);
    Mask seen = bit(s);
    std::fill(parent.begin(), parent.end(), -1);
    queue.clear();
    queue.push_back(s);
    bool closed = false;
    for (std::size_t head = 0; head < queue.size() && !closed; ++head) {
      const int u = queue[head];
      if (out[u] & current & bit(s)) {
        std::vector<Node> cyc;
        for (int w = u; w != -1; w = parent[w]) cyc.push_back(w);
        std::reverse(cyc.begin(), cyc.end());
        if (best.empty() || cyc.size() < best.size()) best = std::move(cyc);
        closed = true;
        break;
      }
      for (Mask nb = out[u] & current & ~seen; nb; nb &= nb - 1) {
        const int w = std::countr_zero(nb);
        seen |= bit(w);
        parent[w] = u;
        queue.push_back(w);
      }
    }
    if (best.size() == 2) break;
  }
  return best;
}

struct MaisSearch {
  const std::vector<Mask>& out;
  int k;
  int best_size = 0;
  Mask best_set = 0;

  static bool lex_smaller(Mask a, Mask b) {
    const Mask d = a ^ b;
    return d && (a & d & (~d + 1));
  }

  void run(Mask current, Mask forced) {
    const int size = std::popcount(current);
    if (size < best_size) return;
    auto cycle = shortest_cycle(out, current, k);
    if (cycle.empty()) {
      if (size > best_size || lex_smaller(current, best_set)) {
        best_size = size;
        best_set = current;
      }
      return;
    }
    Mask newly_forced = 0;
    for (Node v : cycle) {
      if (forced & bit(v)) continue;
      run(current & ~bit(v), forced | newly_forced);
      newly_forced |= bit(v);
    }
  }
};

}  // namespace detail

/// Exact maximum acyclic induced subgraph of complement(g) by branch and bound:
/// branch on the non-forced nodes of a shortest cycle, bound by the incumbent.
/// Ties resolve to the lexicographically smallest node set.
inline DofBound mais(const ConflictGraph& g, int cap = kMaisCap) {
  const int k = g.size();
  if (k > cap || k > 64) throw Error("MAIS search: instance with " + std::to_string(k) + " nodes exceeds cap");
  if (k == 0) return DofBound{0, Rational(1, 1), {}};
  std::vector<detail::Mask> out(k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && !g.has_edge(i, j)) out[i] |= detail::bit(j);
  detail::MaisSearch search{out, k};
  const detail::Mask all = (k == 64) ? ~detail::Mask{0} : (detail::bit(k) - 1);
  search.run(all, 0);
  DofBound b;
  b.mais_size = search.best_size;
  b.bound = Rational(1, search.best_size);
  b.witness = detail::mask_nodes(search.best_set);
  return b;
}

/// Smallest C >= b with b / C <= the MAIS bound.
inline int select_initial_c(const DofBound& bound, int b) {
  if (b < 1) throw Error("stream count must be >= 1");
  return std::max(b, b * bound.mais_size);
}

inline int select_initial_c(const ConflictGraph& g, int b) { return select_initial_c(mais(g), b); }

}  // namespace tim
