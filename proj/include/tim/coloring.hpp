#pragma once

// Proper-coloring heuristics (SLI, TabuCol), exact chromatic number, exact
// local coloring of digraphs and fractional local coloring via node splitting.
// Colors are 1-based; 0 marks an uncolored node during search.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "tim/graph.hpp"

namespace tim {

inline constexpr int kExactColoringCap = 40;
inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

struct Coloring {
  std::vector<int> colors;
  int palette_size = 0;
  int local_width = 0;
};

/// Outcome of a budgeted exact search. `value` empty with `budget_hit` false
/// is a proof of infeasibility.
template <class T>
struct SearchResult {
  std::optional<T> value;
  bool budget_hit = false;
  std::uint64_t expansions = 0;

  bool found() const { return value.has_value(); }
  bool proven_infeasible() const { return !value && !budget_hit; }
};

inline int palette_size(const std::vector<int>& colors) {
  int s = 0;
  for (int c : colors) s = std::max(s, c);
  return s;
}

inline bool is_proper(const UndirectedGraph& g, const std::vector<int>& colors) {
  if (static_cast<int>(colors.size()) != g.size()) return false;
  for (int v = 0; v < g.size(); ++v) {
    if (colors[v] < 1) return false;
    for (int w : g.neighbors(v))
      if (colors[w] == colors[v]) return false;
  }
  return true;
}

/// Max over j of the number of distinct colors in the closed in-neighborhood of j.
inline int local_width(const ConflictGraph& g, const std::vector<int>& colors) {
  int width = 0;
  std::vector<int> seen;
  for (int j = 0; j < g.size(); ++j) {
    seen.assign(1, colors[j]);
    for (int i : g.in_neighbors(j)) seen.push_back(colors[i]);
    std::sort(seen.begin(), seen.end());
    width = std::max(width, static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin()));
  }
  return width;
}

inline Coloring make_coloring(const ConflictGraph& g, std::vector<int> colors) {
  Coloring c;
  c.palette_size = palette_size(colors);
  c.local_width = local_width(g, colors);
  c.colors = std::move(colors);
  return c;
}

inline Coloring make_coloring(const UndirectedGraph& g, std::vector<int> colors) {
  ConflictGraph d(g.size());
  for (auto [u, v] : g.edges()) {
    d.add_edge(u, v);
    d.add_edge(v, u);
  }
  return make_coloring(d, std::move(colors));
}

// ---------------------------------------------------------------------------
// SLI: smallest-last ordering with two-color interchange.

namespace detail {

inline std::vector<int> smallest_last_order(const UndirectedGraph& g, std::mt19937_64& rng) {
  const int n = g.size();
  std::vector<int> deg(n);
  std::vector<char> removed(n, 0);
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  std::vector<int> removal;
  removal.reserve(n);
  std::vector<int> ties;
  for (int step = 0; step < n; ++step) {
    int min_deg = std::numeric_limits<int>::max();
    ties.clear();
    for (int v = 0; v < n; ++v) {
      if (removed[v]) continue;
      if (deg[v] < min_deg) {
        min_deg = deg[v];
        ties.assign(1, v);
      } else if (deg[v] == min_deg) {
        ties.push_back(v);
      }
    }
    const int v = ties[std::uniform_int_distribution<std::size_t>(0, ties.size() - 1)(rng)];
    removed[v] = 1;
    removal.push_back(v);
    for (int w : g.neighbors(v))
      if (!removed[w]) --deg[w];
  }
  std::reverse(removal.begin(), removal.end());
  return removal;
}

// Nodes of the (a, b)-Kempe chain containing `start`.
inline std::vector<int> kempe_chain(const UndirectedGraph& g, const std::vector<int>& colors, int start, int a, int b,
                                    std::vector<char>& mark) {
  std::vector<int> chain{start};
  mark[start] = 1;
  for (std::size_t h = 0; h < chain.size(); ++h)
    for (int w : g.neighbors(chain[h]))
      if (!mark[w] && (colors[w] == a || colors[w] == b)) {
        mark[w] = 1;
        chain.push_back(w);
      }
  return chain;
}

// Frees color a (or b) at v by swapping the Kempe chains through v's a-neighbors.
inline int try_interchange(const UndirectedGraph& g, std::vector<int>& colors, int v, int palette) {
  for (int a = 1; a <= palette; ++a)
    for (int b = 1; b <= palette; ++b) {
      if (a == b) continue;
      std::vector<char> mark(g.size(), 0);
      std::vector<int> to_swap;
      bool blocked = false;
      for (int w : g.neighbors(v)) {
        if (colors[w] != a || mark[w]) continue;
        auto chain = kempe_chain(g, colors, w, a, b, mark);
        for (int x : chain)
          if (x != v && colors[x] == b && g.has_edge(x, v)) blocked = true;
        if (blocked) break;
        to_swap.insert(to_swap.end(), chain.begin(), chain.end());
      }
      if (blocked) continue;
      for (int x : to_swap) colors[x] = colors[x] == a ? b : a;
      return a;
    }
  return 0;
}

}  // namespace detail

inline Coloring sli_greedy(const UndirectedGraph& g, std::uint64_t seed = 0) {
  std::mt19937_64 rng(seed);
  const auto order = detail::smallest_last_order(g, rng);
  std::vector<int> colors(g.size(), 0);
  int palette = 0;
  std::vector<char> used;
  for (int v : order) {
    used.assign(palette + 2, 0);
    for (int w : g.neighbors(v)) used[colors[w]] = 1;
    int c = 1;
    while (c <= palette && used[c]) ++c;
    if (c > palette && palette >= 2) {
      if (int freed = detail::try_interchange(g, colors, v, palette)) c = freed;
    }
    colors[v] = c;
    palette = std::max(palette, c);
  }
  return make_coloring(g, std::move(colors));
}

// ---------------------------------------------------------------------------
// TabuCol.

inline std::optional<Coloring> tabucol(const UndirectedGraph& g, int k, int max_iter, std::uint64_t seed = 0) {
  if (k < 1) throw Error("tabucol palette must be >= 1");
  const int n = g.size();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> col(n);
  for (auto& c : col) c = pick(rng);
  // gamma[v * k + c]: neighbors of v currently colored c.
  std::vector<int> gamma(static_cast<std::size_t>(n) * k, 0);
  for (int v = 0; v < n; ++v)
    for (int w : g.neighbors(v)) ++gamma[v * k + col[w]];
  int conflicts = 0;
  for (auto [u, v] : g.edges())
    if (col[u] == col[v]) ++conflicts;
  std::vector<long> tabu(static_cast<std::size_t>(n) * k, 0);
  int best = conflicts;
  std::uniform_int_distribution<int> jitter(0, 9);
  for (int iter = 0; iter < max_iter && conflicts > 0; ++iter) {
    int best_delta = std::numeric_limits<int>::max();
    std::vector<std::pair<int, int>> moves;
    for (int v = 0; v < n; ++v) {
      if (gamma[v * k + col[v]] == 0) continue;
      for (int c = 0; c < k; ++c) {
        if (c == col[v]) continue;
        const int delta = gamma[v * k + c] - gamma[v * k + col[v]];
        const bool is_tabu = tabu[v * k + c] > iter;
        if (is_tabu && conflicts + delta >= best) continue;  // aspiration
        if (delta < best_delta) {
          best_delta = delta;
          moves.assign(1, {v, c});
        } else if (delta == best_delta) {
          moves.emplace_back(v, c);
        }
      }
    }
    if (moves.empty()) continue;
    auto [v, c] = moves[std::uniform_int_distribution<std::size_t>(0, moves.size() - 1)(rng)];
    const int old = col[v];
    for (int w : g.neighbors(v)) {
      --gamma[w * k + old];
      ++gamma[w * k + c];
    }
    col[v] = c;
    conflicts += best_delta;
    tabu[v * k + old] = iter + static_cast<long>(0.6 * conflicts) + jitter(rng);
    best = std::min(best, conflicts);
  }
  if (conflicts > 0) return std::nullopt;
  for (auto& c : col) ++c;
  return make_coloring(g, std::move(col));
}

// ---------------------------------------------------------------------------
// Exact chromatic number.

namespace detail {

inline int max_clique_size(const UndirectedGraph& g) {
  const int n = g.size();
  if (n == 0) return 0;
  std::vector<std::uint64_t> adj(n, 0);
  for (auto [u, v] : g.edges()) {
    adj[u] |= std::uint64_t{1} << v;
    adj[v] |= std::uint64_t{1} << u;
  }
  int best = 0;
  auto expand = [&](auto&& self, std::uint64_t cand, int size) -> void {
    if (!cand) {
      best = std::max(best, size);
      return;
    }
    if (size + std::popcount(cand) <= best) return;
    while (cand) {
      if (size + std::popcount(cand) <= best) return;
      const int v = std::countr_zero(cand);
      cand &= cand - 1;
      self(self, cand & adj[v], size + 1);
    }
  };
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  expand(expand, all, 0);
  return best;
}

// DSATUR backtracking for a k-coloring with color symmetry breaking.
struct DsaturSearch {
  const UndirectedGraph& g;
  int k;
  std::uint64_t budget;
  std::vector<int> colors;
  std::vector<std::vector<int>> nb_count;  // [v][c] colored neighbors of v with color c
  std::vector<int> saturation;
  std::uint64_t expansions = 0;
  bool budget_hit = false;

  DsaturSearch(const UndirectedGraph& graph, int palette, std::uint64_t limit)
      : g(graph), k(palette), budget(limit), colors(graph.size(), 0),
        nb_count(graph.size(), std::vector<int>(palette + 1, 0)), saturation(graph.size(), 0) {}

  void assign(int v, int c) {
    colors[v] = c;
    for (int w : g.neighbors(v))
      if (nb_count[w][c]++ == 0) ++saturation[w];
  }
  void unassign(int v) {
    const int c = colors[v];
    colors[v] = 0;
    for (int w : g.neighbors(v))
      if (--nb_count[w][c] == 0) --saturation[w];
  }

  int pick() const {
    int best = -1;
    for (int v = 0; v < g.size(); ++v) {
      if (colors[v]) continue;
      if (best < 0 || saturation[v] > saturation[best] ||
          (saturation[v] == saturation[best] && g.degree(v) > g.degree(best)))
        best = v;
    }
    return best;
  }

  bool solve(int colored, int max_used) {
    if (colored == g.size()) return true;
    if (++expansions > budget) {
      budget_hit = true;
      return false;
    }
    const int v = pick();
    const int limit = std::min(k, max_used + 1);
    for (int c = 1; c <= limit; ++c) {
      if (nb_count[v][c]) continue;
      assign(v, c);
      if (solve(colored + 1, std::max(max_used, c))) return true;
      unassign(v);
      if (budget_hit) return false;
    }
    return false;
  }
};

}  // namespace detail

/// Exact k-colorability by DSATUR backtracking.
inline SearchResult<Coloring> k_coloring(const UndirectedGraph& g, int k, std::uint64_t budget = kUnlimited) {
  detail::DsaturSearch s(g, k, budget);
  SearchResult<Coloring> r;
  const bool ok = s.solve(0, 0);
  r.expansions = s.expansions;
  r.budget_hit = s.budget_hit;
  if (ok) r.value = make_coloring(g, s.colors);
  return r;
}

/// Optimal proper coloring: clique lower bound, SLI upper bound, then DSATUR
/// backtracking for each k between them.
inline Coloring optimal_coloring(const UndirectedGraph& g, int cap = kExactColoringCap) {
  if (g.size() > cap || g.size() > 64)
    throw Error("chromatic number: graph with " + std::to_string(g.size()) + " nodes exceeds cap");
  if (g.size() == 0) return Coloring{};
  Coloring upper = sli_greedy(g, 0);
  const int lower = std::max(1, detail::max_clique_size(g));
  for (int k = lower; k < upper.palette_size; ++k) {
    auto r = k_coloring(g, k);
    if (r.value) return *r.value;
  }
  return upper;
}

inline int chromatic_number(const UndirectedGraph& g, int cap = kExactColoringCap) {
  return optimal_coloring(g, cap).palette_size;
}

// ---------------------------------------------------------------------------
// Exact local coloring.

namespace detail {

struct LocalColoringSearch {
  const ConflictGraph& g;
  const UndirectedGraph u;
  int width;
  int palette;
  std::uint64_t budget;
  std::vector<int> colors;
  std::vector<std::vector<int>> nb_count;     // undirected neighbors of v per color
  std::vector<int> saturation;
  std::vector<std::vector<int>> local_count;  // closed in-neighborhood of j per color
  std::vector<int> local_distinct;
  std::uint64_t expansions = 0;
  bool budget_hit = false;

  LocalColoringSearch(const ConflictGraph& graph, int w, std::uint64_t limit)
      : g(graph), u(underlying_undirected(graph)), width(w), palette(graph.size()), budget(limit),
        colors(graph.size(), 0), nb_count(graph.size(), std::vector<int>(graph.size() + 1, 0)),
        saturation(graph.size(), 0), local_count(graph.size(), std::vector<int>(graph.size() + 1, 0)),
        local_distinct(graph.size(), 0) {}

  // Closed in-neighborhoods containing v: v itself and its out-neighbors.
  template <class F>
  void for_each_watcher(int v, F&& f) const {
    f(v);
    for (int j : g.out_neighbors(v)) f(j);
  }

  bool assign(int v, int c) {
    colors[v] = c;
    for (int w : u.neighbors(v))
      if (nb_count[w][c]++ == 0) ++saturation[w];
    bool ok = true;
    for_each_watcher(v, [&](int j) {
      if (local_count[j][c]++ == 0 && ++local_distinct[j] > width) ok = false;
    });
    return ok;
  }
  void unassign(int v) {
    const int c = colors[v];
    colors[v] = 0;
    for (int w : u.neighbors(v))
      if (--nb_count[w][c] == 0) --saturation[w];
    for_each_watcher(v, [&](int j) {
      if (--local_count[j][c] == 0) --local_distinct[j];
    });
  }

  int pick() const {
    int best = -1;
    for (int v = 0; v < g.size(); ++v) {
      if (colors[v]) continue;
      if (best < 0 || saturation[v] > saturation[best] ||
          (saturation[v] == saturation[best] && u.degree(v) > u.degree(best)))
        best = v;
    }
    return best;
  }

  bool solve(int colored, int max_used) {
    if (colored == g.size()) return true;
    if (++expansions > budget) {
      budget_hit = true;
      return false;
    }
    const int v = pick();
    const int limit = std::min(palette, max_used + 1);
    for (int c = 1; c <= limit; ++c) {
      if (nb_count[v][c]) continue;
      const bool ok = assign(v, c);
      if (ok && solve(colored + 1, std::max(max_used, c))) return true;
      unassign(v);
      if (budget_hit) return false;
    }
    return false;
  }
};

}  // namespace detail

/// Proper coloring of the underlying undirected graph whose local width is at
/// most `c_target`, by DSATUR-ordered backtracking. Exhaustive unless the
/// node-expansion budget runs out.
inline SearchResult<Coloring> local_coloring_exact(const ConflictGraph& g, int c_target,
                                                   std::uint64_t budget = kUnlimited,
                                                   int cap = 2 * kExactColoringCap) {
  if (c_target < 1) throw Error("local coloring width must be >= 1");
  if (g.size() > cap) throw Error("local coloring: instance exceeds exact cap");
  detail::LocalColoringSearch s(g, c_target, budget);
  SearchResult<Coloring> r;
  const bool ok = s.solve(0, 0);
  r.expansions = s.expansions;
  r.budget_hit = s.budget_hit;
  if (ok) r.value = make_coloring(g, s.colors);
  return r;
}

/// b colors per node, no color shared across an edge, at most c_target colors
/// in any closed in-neighborhood. Solved as local coloring of the b-order split graph.
inline SearchResult<std::vector<std::vector<int>>> fractional_local_coloring(const ConflictGraph& g, int b,
                                                                             int c_target,
                                                                             std::uint64_t budget = kUnlimited) {
  const SplitGraph sg = node_split(g, b);
  auto split = local_coloring_exact(sg.graph, c_target, budget);
  SearchResult<std::vector<std::vector<int>>> r;
  r.budget_hit = split.budget_hit;
  r.expansions = split.expansions;
  if (split.value) r.value = merge_split_assignment(sg, split.value->colors);
  return r;
}

/// Local width of a b-fold coloring: distinct colors across the closed in-neighborhood.
inline int fractional_local_width(const ConflictGraph& g, const std::vector<std::vector<int>>& colors) {
  int width = 0;
  std::vector<int> seen;
  for (int j = 0; j < g.size(); ++j) {
    seen = colors[j];
    for (int i : g.in_neighbors(j)) seen.insert(seen.end(), colors[i].begin(), colors[i].end());
    std::sort(seen.begin(), seen.end());
    width = std::max(width, static_cast<int>(std::unique(seen.begin(), seen.end()) - seen.begin()));
  }
  return width;
}

}  // namespace tim
