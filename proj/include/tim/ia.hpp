#pragma once

// Interference-alignment schemes: verification of the per-node rank condition
// rank(S_j) - rank(I_j) = b, constructions from (fractional) local colorings,
// subspace search over 0-1 beamforming vectors, combinatorial SIMO search and
// the TDMA -> OSIA -> OVIA -> SSIA -> SVIA method ladder.
//
// Combining matrices are never built: when every node satisfies the rank
// condition, the desired space meets the interference space trivially and a
// zero-forcing U_j (any basis of the annihilator of I_j restricted to S_j)
// recovers the b streams.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tim/bounds.hpp"
#include "tim/coloring.hpp"
#include "tim/exact_linalg.hpp"
#include "tim/graph.hpp"
#include "tim/rational.hpp"

namespace tim {

enum class Method { TDMA, OSIA, OVIA, SSIA, SVIA, SIMO_SCALAR, SIMO_VECTOR };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::TDMA: return "TDMA";
    case Method::OSIA: return "OSIA";
    case Method::OVIA: return "OVIA";
    case Method::SSIA: return "SSIA";
    case Method::SVIA: return "SVIA";
    case Method::SIMO_SCALAR: return "SIMO_SCALAR";
    case Method::SIMO_VECTOR: return "SIMO_VECTOR";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  for (Method m : {Method::TDMA, Method::OSIA, Method::OVIA, Method::SSIA, Method::SVIA, Method::SIMO_SCALAR,
                   Method::SIMO_VECTOR})
    if (s == method_name(m)) return m;
  throw Error("unknown method '" + s + "'");
}

struct CodingScheme {
  int c = 1;
  int b = 1;
  int n = 1;
  Method method = Method::TDMA;
  std::vector<std::vector<IntVector>> assignment;  // node -> b columns of dimension c

  Rational dof() const { return Rational(b, c); }
};

struct NodeRanks {
  Node node = 0;
  int rank_s = 0;
  int rank_i = 0;
};

struct VerifyReport {
  bool valid = true;
  std::vector<NodeRanks> per_node;
  Rational dof{1, 1};
  int b = 1;

  std::vector<Node> failing_nodes() const {
    std::vector<Node> out;
    for (const auto& r : per_node)
      if (r.rank_s - r.rank_i != b) out.push_back(r.node);
    return out;
  }
};

inline constexpr int kDefaultTrials = 3;

namespace detail {

inline void check_scheme_shape(const ConflictGraph& g, const CodingScheme& s) {
  if (s.b < 1 || s.c < 1 || s.n < 1) throw Error("scheme parameters must be positive");
  if (s.b > s.c) throw Error("scheme has b > c");
  if (static_cast<int>(s.assignment.size()) != g.size())
    throw Error("scheme assigns " + std::to_string(s.assignment.size()) + " nodes, graph has " +
                std::to_string(g.size()));
  for (int v = 0; v < g.size(); ++v) {
    if (static_cast<int>(s.assignment[v].size()) != s.b)
      throw Error("node " + std::to_string(v + 1) + " does not carry exactly b vectors");
    for (const auto& col : s.assignment[v])
      if (static_cast<int>(col.size()) != s.c)
        throw Error("node " + std::to_string(v + 1) + ": vector dimension mismatch");
  }
}

inline std::uint64_t node_seed(std::uint64_t seed, int j) { return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(j) + 1; }

}  // namespace detail

/// Checks rank(S_j) - rank(I_j) = b at every node. Exact for n = 1; for n > 1
/// the ranks are generic ranks of the Kronecker-lifted spaces.
inline VerifyReport verify(const ConflictGraph& g, const CodingScheme& s, int trials = kDefaultTrials,
                           std::uint64_t seed = 0) {
  detail::check_scheme_shape(g, s);
  VerifyReport rep;
  rep.b = s.b;
  rep.dof = s.dof();
  for (int j = 0; j < g.size(); ++j) {
    NodeRanks nr{j, 0, 0};
    if (s.n == 1) {
      std::vector<IntVector> cols;
      for (Node i : g.in_neighbors(j))
        for (const auto& v : s.assignment[i]) cols.push_back(v);
      nr.rank_i = cols.empty() ? 0 : rank(IntMatrix::from_columns(cols, s.c));
      for (const auto& v : s.assignment[j]) cols.push_back(v);
      nr.rank_s = rank(IntMatrix::from_columns(cols, s.c));
    } else {
      std::vector<LiftedBlock> blocks;
      for (Node i : g.in_neighbors(j)) blocks.push_back({s.n, s.assignment[i]});
      const auto sd = detail::node_seed(seed, j);
      nr.rank_i = generic_rank_lifted(blocks, s.c, trials, sd);
      blocks.push_back({s.n, s.assignment[j]});
      nr.rank_s = generic_rank_lifted(blocks, s.c, trials, sd);
    }
    if (nr.rank_s - nr.rank_i != s.b) rep.valid = false;
    rep.per_node.push_back(nr);
  }
  return rep;
}

/// rank(D_j) and dim(D_j ∩ I_j) for a single-antenna scheme; a decodable node
/// has (b, 0).
inline std::pair<int, int> desired_space_ranks(const ConflictGraph& g, const CodingScheme& s, Node j) {
  std::vector<IntVector> interf;
  for (Node i : g.in_neighbors(j))
    for (const auto& v : s.assignment[i]) interf.push_back(v);
  const int ri = interf.empty() ? 0 : rank(IntMatrix::from_columns(interf, s.c));
  const int rd = rank(IntMatrix::from_columns(s.assignment[j], s.c));
  auto all = interf;
  all.insert(all.end(), s.assignment[j].begin(), s.assignment[j].end());
  const int rs = rank(IntMatrix::from_columns(all, s.c));
  return {rd, rd + ri - rs};
}

// ---------------------------------------------------------------------------
// Constructions from colorings.

/// Maps color i to the i-th generic vector of dimension c. `colors[v]` holds
/// the b colors of node v (1-based).
inline CodingScheme scheme_from_coloring(const ConflictGraph& g, const std::vector<std::vector<int>>& colors, int c,
                                         int n = 1) {
  if (static_cast<int>(colors.size()) != g.size()) throw Error("coloring size mismatch");
  const int b = g.size() ? static_cast<int>(colors[0].size()) : 1;
  int s = 0;
  for (const auto& cs : colors) {
    if (static_cast<int>(cs.size()) != b) throw Error("every node needs the same number of colors");
    for (int x : cs) s = std::max(s, x);
  }
  if (g.size() && fractional_local_width(g, colors) > c)
    throw Error("coloring local width exceeds coding-space dimension " + std::to_string(c));
  const VectorSet palette = gen_generic_vectors(c, std::max(s, c));
  CodingScheme scheme;
  scheme.c = c;
  scheme.b = b;
  scheme.n = n;
  scheme.method = b == 1 ? Method::OSIA : Method::OVIA;
  scheme.assignment.resize(g.size());
  for (int v = 0; v < g.size(); ++v)
    for (int x : colors[v]) scheme.assignment[v].push_back(palette.vectors[x - 1]);
  return scheme;
}

inline CodingScheme scheme_from_coloring(const ConflictGraph& g, const std::vector<int>& colors, int c, int n = 1) {
  std::vector<std::vector<int>> wrapped(colors.size());
  for (std::size_t v = 0; v < colors.size(); ++v) wrapped[v] = {colors[v]};
  return scheme_from_coloring(g, wrapped, c, n);
}

/// Orthogonal access: an optimal proper coloring, color i -> e_i, C = chi.
inline CodingScheme tdma_scheme(const ConflictGraph& g, int cap = kExactColoringCap) {
  const Coloring col = optimal_coloring(underlying_undirected(g), cap);
  CodingScheme s;
  s.c = std::max(1, col.palette_size);
  s.b = 1;
  s.method = Method::TDMA;
  s.assignment.resize(g.size());
  for (int v = 0; v < g.size(); ++v) {
    IntVector e(s.c, 0);
    e[col.colors[v] - 1] = 1;
    s.assignment[v] = {e};
  }
  return s;
}

// ---------------------------------------------------------------------------
// Subspace search over 0-1 vectors.

namespace detail {

// Rank of 0/1 columns of dimension <= 16, computed modulo p = 2^31 - 1. Every
// minor of such a matrix is below the Hadamard bound 17^8.5 / 2^16 < p, so a
// minor vanishes mod p iff it vanishes over the rationals and the two ranks agree.
class PatternBasis {
 public:
  static constexpr std::uint64_t kPrime = 2147483647ULL;

  explicit PatternBasis(int c) : c_(c) {}

  int rank() const { return rank_; }

  bool contains(std::uint32_t pattern) const {
    auto v = reduce(pattern);
    return std::all_of(v.begin(), v.begin() + c_, [](std::uint64_t x) { return x == 0; });
  }

  // Adds the pattern; returns whether it was independent of the basis.
  bool insert(std::uint32_t pattern) {
    auto v = reduce(pattern);
    int piv = -1;
    for (int x = 0; x < c_ && piv < 0; ++x)
      if (v[x]) piv = x;
    if (piv < 0) return false;
    const std::uint64_t inv = inverse(v[piv]);
    for (int x = 0; x < c_; ++x) v[x] = v[x] * inv % kPrime;
    rows_[rank_] = v;
    pivot_[rank_] = piv;
    ++rank_;
    return true;
  }

 private:
  std::array<std::uint64_t, kBinaryVectorCap> reduce(std::uint32_t pattern) const {
    std::array<std::uint64_t, kBinaryVectorCap> v{};
    for (int x = 0; x < c_; ++x) v[x] = (pattern >> x) & 1u;
    for (int r = 0; r < rank_; ++r) {
      const std::uint64_t f = v[pivot_[r]];
      if (f == 0) continue;
      for (int x = 0; x < c_; ++x) v[x] = (v[x] + (kPrime - f) * rows_[r][x]) % kPrime;
    }
    return v;
  }

  static std::uint64_t inverse(std::uint64_t a) {
    std::uint64_t result = 1, e = kPrime - 2;
    while (e) {
      if (e & 1) result = result * a % kPrime;
      a = a * a % kPrime;
      e >>= 1;
    }
    return result;
  }

  int c_;
  int rank_ = 0;
  std::array<std::array<std::uint64_t, kBinaryVectorCap>, kBinaryVectorCap> rows_{};
  std::array<int, kBinaryVectorCap> pivot_{};
};

inline int pattern_rank(const std::vector<std::uint32_t>& patterns, int c) {
  PatternBasis basis(c);
  for (auto p : patterns) basis.insert(p);
  return basis.rank();
}

struct SubspaceSearch {
  const ConflictGraph& g;  // scalar graph (node-split when b > 1)
  int c;
  int n;
  int trials;
  std::uint64_t seed;
  std::uint64_t budget;
  std::vector<int> order;
  std::vector<std::uint32_t> assign;  // 0 = unassigned
  std::vector<int> prefix;             // coordinates in use before each depth
  std::uint64_t expansions = 0;
  bool budget_hit = false;
  int b = 1;  // split order; copies of a node are b*v .. b*v+b-1

  // With b = 2 the two copies of a node are assigned back to back in
  // increasing pattern order: swapping them is a symmetry, and canonical
  // coordinates still admit one of the two orders.
  int pending_sibling() const {
    if (b != 2) return -1;
    for (int u = 0; u < g.size(); u += 2)
      if ((assign[u] == 0) != (assign[u + 1] == 0)) return assign[u] ? u + 1 : u;
    return -1;
  }

  bool independent_of_interference(int j) const {
    std::vector<std::uint32_t> interf;
    for (Node i : g.in_neighbors(j))
      if (assign[i]) interf.push_back(assign[i]);
    if (interf.empty()) return true;
    if (n == 1) {
      PatternBasis basis(c);
      for (auto p : interf) basis.insert(p);
      return basis.insert(assign[j]);
    }
    std::vector<LiftedBlock> blocks;
    for (auto p : interf) blocks.push_back({n, {binary_vector(c, p)}});
    const auto sd = node_seed(seed, j);
    const int ri = generic_rank_lifted(blocks, c, trials, sd);
    blocks.push_back({n, {binary_vector(c, assign[j])}});
    return generic_rank_lifted(blocks, c, trials, sd) == ri + 1;
  }

  bool consistent(int v) const {
    if (!independent_of_interference(v)) return false;
    for (Node j : g.out_neighbors(v))
      if (assign[j] && !independent_of_interference(j)) return false;
    return true;
  }

  // Single-antenna case: patterns for v that break its own condition or that of
  // an assigned out-neighbor, as a bitmap over 1..2^c-1.
  std::vector<char> forbidden_for(int v) const {
    const std::uint32_t count = (1u << c) - 1u;
    std::vector<char> bad(count + 1, 0);
    PatternBasis own(c);
    for (Node i : g.in_neighbors(v))
      if (assign[i]) own.insert(assign[i]);
    if (own.rank() > 0)
      for (std::uint32_t p = 1; p <= count; ++p) bad[p] = own.contains(p);
    for (Node j : g.out_neighbors(v)) {
      if (!assign[j]) continue;
      PatternBasis rest(c);
      for (Node i : g.in_neighbors(j))
        if (assign[i]) rest.insert(assign[i]);
      PatternBasis with_j = rest;
      with_j.insert(assign[j]);
      for (std::uint32_t p = 1; p <= count; ++p)
        if (!bad[p] && with_j.contains(p) && !rest.contains(p)) bad[p] = 1;
    }
    return bad;
  }

  bool solve(std::size_t depth) {
    if (depth == order.size()) return true;
    if (++expansions > budget) {
      budget_hit = true;
      return false;
    }
    int v = order[depth];
    const std::uint32_t count = (1u << c) - 1u;
    const int used = prefix[depth];
    const int sibling_of = pending_sibling();
    std::vector<char> bad;
    if (n == 1) {
      // Most constrained unassigned node next; a node with no admissible pattern fails the branch.
      int best_free = -1;
      for (int u = 0; u < g.size(); ++u) {
        if (assign[u]) continue;
        auto f = forbidden_for(u);
        const int free = static_cast<int>(count) - static_cast<int>(std::count(f.begin() + 1, f.end(), 1));
        if (free == 0) return false;
        if (sibling_of >= 0 ? u == sibling_of : (best_free < 0 || free < best_free)) {
          best_free = free;
          v = u;
          bad = std::move(f);
        }
      }
    }
    const std::uint32_t lowest = sibling_of >= 0 ? assign[v ^ 1] : 0;
    for (std::uint32_t p = lowest + 1; p <= count; ++p) {
      // Coordinates are interchangeable: new ones enter as the lowest unused block.
      const std::uint32_t fresh = p >> used;
      if (fresh & (fresh + 1)) continue;
      if (n == 1 && bad[p]) continue;
      prefix[depth + 1] = used + std::popcount(fresh);
      assign[v] = p;
      if ((n == 1 || consistent(v)) && solve(depth + 1)) return true;
      assign[v] = 0;
      if (budget_hit) return false;
    }
    return false;
  }
};

}  // namespace detail

/// Backtracking assignment of b binary vectors per node (node-split for b > 1)
/// such that every node satisfies the rank condition. Nodes are visited by
/// decreasing in-degree, candidates by increasing bit pattern; any partial
/// assignment whose decided part already violates the condition is pruned.
inline SearchResult<CodingScheme> subspace_search(const ConflictGraph& g, int b, int c, int n = 1,
                                                  std::uint64_t budget = kUnlimited, int trials = kDefaultTrials,
                                                  std::uint64_t seed = 0) {
  if (b < 1 || c < 1 || n < 1) throw Error("subspace search parameters must be positive");
  if (c > kBinaryVectorCap) throw Error("subspace search: dimension exceeds binary vector cap");
  SearchResult<CodingScheme> result;
  if (b > c) return result;
  const SplitGraph sg = node_split(g, b);
  detail::SubspaceSearch search{sg.graph, c, n, trials, seed, budget, {}, {}, {}};
  search.b = b;
  search.assign.assign(sg.graph.size(), 0);
  search.prefix.assign(sg.graph.size() + 1, 0);
  search.order.resize(sg.graph.size());
  for (int s = 0; s < sg.graph.size(); ++s) search.order[s] = s;
  // Decreasing base in-degree; split copies stay consecutive.
  std::stable_sort(search.order.begin(), search.order.end(), [&](int x, int y) {
    const int dx = g.in_degree(sg.back_map[x]);
    const int dy = g.in_degree(sg.back_map[y]);
    if (dx != dy) return dx > dy;
    return x < y;
  });
  const bool ok = search.solve(0);
  result.expansions = search.expansions;
  result.budget_hit = search.budget_hit;
  if (!ok) return result;
  CodingScheme s;
  s.c = c;
  s.b = b;
  s.n = n;
  if (n == 1)
    s.method = b == 1 ? Method::SSIA : Method::SVIA;
  else
    s.method = b == 1 ? Method::SIMO_SCALAR : Method::SIMO_VECTOR;
  s.assignment.resize(g.size());
  const auto merged = merge_split_assignment(sg, search.assign);
  for (int v = 0; v < g.size(); ++v)
    for (auto p : merged[v]) s.assignment[v].push_back(binary_vector(c, p));
  result.value = std::move(s);
  return result;
}

// ---------------------------------------------------------------------------
// SIMO: combinatorial alignment over a generic palette.

/// With every c palette vectors independent: node j decodes iff at most n-1
/// in-neighbors share its vector and its closed in-neighborhood uses at most
/// c distinct vectors. `assignment` holds 1-based palette indices.
inline bool simo_scalar_check(const ConflictGraph& g, const std::vector<int>& assignment, int c, int n) {
  if (static_cast<int>(assignment.size()) != g.size()) throw Error("assignment size mismatch");
  std::vector<int> seen;
  for (int j = 0; j < g.size(); ++j) {
    int same = 0;
    seen.assign(1, assignment[j]);
    for (Node i : g.in_neighbors(j)) {
      if (assignment[i] == assignment[j]) ++same;
      seen.push_back(assignment[i]);
    }
    if (same > n - 1) return false;
    std::sort(seen.begin(), seen.end());
    if (std::unique(seen.begin(), seen.end()) - seen.begin() > c) return false;
  }
  return true;
}

namespace detail {

struct SimoSearch {
  const ConflictGraph& g;
  const std::vector<int>& group;  // nodes sharing a group id must differ
  int c;
  int n;
  std::uint64_t budget;
  std::vector<int> order;
  std::vector<int> colors;
  std::vector<std::vector<int>> local_count;
  std::vector<int> local_distinct;
  std::uint64_t expansions = 0;
  bool budget_hit = false;

  bool assign(int v, int x) {
    colors[v] = x;
    bool ok = true;
    auto touch = [&](int j) {
      if (local_count[j][x]++ == 0 && ++local_distinct[j] > c) ok = false;
      if (colors[j] == x && local_count[j][x] > n) ok = false;
    };
    touch(v);
    for (Node j : g.out_neighbors(v)) touch(j);
    return ok;
  }
  void unassign(int v) {
    const int x = colors[v];
    colors[v] = 0;
    auto untouch = [&](int j) {
      if (--local_count[j][x] == 0) --local_distinct[j];
    };
    untouch(v);
    for (Node j : g.out_neighbors(v)) untouch(j);
  }
  bool group_clash(int v, int x) const {
    if (group[v] < 0) return false;
    for (int u = 0; u < g.size(); ++u)
      if (u != v && group[u] == group[v] && colors[u] == x) return true;
    return false;
  }

  bool solve(std::size_t depth, int max_used) {
    if (depth == order.size()) return true;
    if (++expansions > budget) {
      budget_hit = true;
      return false;
    }
    const int v = order[depth];
    const int limit = std::min(g.size(), max_used + 1);
    for (int x = 1; x <= limit; ++x) {
      if (group_clash(v, x)) continue;
      const bool ok = assign(v, x);
      if (ok && solve(depth + 1, std::max(max_used, x))) return true;
      unassign(v);
      if (budget_hit) return false;
    }
    return false;
  }
};

inline std::vector<int> degree_order(const ConflictGraph& g) {
  std::vector<int> order(g.size());
  for (int v = 0; v < g.size(); ++v) order[v] = v;
  // Breadth-first from the highest-degree node keeps constrained nodes adjacent.
  auto deg = [&](int v) { return g.in_degree(v) + static_cast<int>(g.out_neighbors(v).size()); };
  std::vector<char> placed(g.size(), 0);
  std::vector<int> out;
  while (static_cast<int>(out.size()) < g.size()) {
    int root = -1;
    for (int v = 0; v < g.size(); ++v)
      if (!placed[v] && (root < 0 || deg(v) > deg(root))) root = v;
    std::vector<int> frontier{root};
    placed[root] = 1;
    for (std::size_t h = 0; h < frontier.size(); ++h) {
      const int u = frontier[h];
      out.push_back(u);
      std::vector<int> next;
      for (int w : g.in_neighbors(u))
        if (!placed[w]) next.push_back(w);
      for (int w : g.out_neighbors(u))
        if (!placed[w]) next.push_back(w);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      std::stable_sort(next.begin(), next.end(), [&](int a, int b) { return deg(a) > deg(b); });
      for (int w : next) {
        placed[w] = 1;
        frontier.push_back(w);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Exhaustive search for a palette assignment passing simo_scalar_check.
inline SearchResult<std::vector<int>> simo_scalar_search(const ConflictGraph& g, int c, int n,
                                                         std::uint64_t budget = kUnlimited,
                                                         const std::vector<int>* groups = nullptr) {
  std::vector<int> none(g.size(), -1);
  const std::vector<int>& group = groups ? *groups : none;
  detail::SimoSearch s{g, group, c, n, budget, detail::degree_order(g), std::vector<int>(g.size(), 0),
                       std::vector<std::vector<int>>(g.size(), std::vector<int>(g.size() + 1, 0)),
                       std::vector<int>(g.size(), 0)};
  SearchResult<std::vector<int>> r;
  const bool ok = s.solve(0, 0);
  r.expansions = s.expansions;
  r.budget_hit = s.budget_hit;
  if (ok) r.value = s.colors;
  return r;
}

/// SIMO scheme with b streams per node: b = 1 searches g directly, b > 1 the
/// split graph with distinct vectors per node.
inline SearchResult<CodingScheme> simo_search(const ConflictGraph& g, int b, int c, int n,
                                              std::uint64_t budget = kUnlimited) {
  SearchResult<CodingScheme> out;
  if (b > c) return out;
  const SplitGraph sg = node_split(g, b);
  std::vector<int> groups(sg.graph.size(), -1);
  if (b > 1)
    for (int s = 0; s < sg.graph.size(); ++s) groups[s] = sg.back_map[s];
  auto r = simo_scalar_search(sg.graph, c, n, budget, &groups);
  out.expansions = r.expansions;
  out.budget_hit = r.budget_hit;
  if (!r.value) return out;
  const auto merged = merge_split_assignment(sg, *r.value);
  auto scheme = scheme_from_coloring(g, merged, c, n);
  scheme.method = b == 1 ? Method::SIMO_SCALAR : Method::SIMO_VECTOR;
  out.value = std::move(scheme);
  return out;
}

// ---------------------------------------------------------------------------
// Method ladder.

struct LadderConfig {
  bool use_osia = true;
  bool use_ovia = true;
  bool use_ssia = true;
  bool use_simo = true;
  int max_b = 2;             // OVIA streams
  int max_b_subspace = 1;    // 1 = SSIA only; 2+ adds SVIA
  int simo_max_b = 1;        // SIMO vector streams
  bool simo_subspace = false;  // lifted binary search for n > 1 (slow)
  std::uint64_t coloring_budget = 2'000'000;
  std::uint64_t subspace_budget = 2'000'000;
  std::uint64_t simo_budget = 2'000'000;
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
};

struct StageRecord {
  Method method;
  int b = 1;
  int c = 1;
  bool found = false;
  bool budget_hit = false;
};

struct LadderResult {
  CodingScheme scheme;
  Method method = Method::TDMA;
  Rational dof{1, 1};
  DofBound bound;
  std::vector<StageRecord> attempts;
  // Best DoF after each stage, in ladder order (TDMA, OSIA, OVIA, subspace, SIMO).
  std::map<Method, Rational> floor_after;

  bool optimal() const { return dof == bound.bound; }
};

inline LadderResult best_scheme(const ConflictGraph& g, int n = 1, const LadderConfig& cfg = {}) {
  LadderResult res;
  res.bound = mais(g);
  res.scheme = tdma_scheme(g);
  res.scheme.n = n;
  res.dof = res.scheme.dof();
  res.method = Method::TDMA;
  res.floor_after[Method::TDMA] = res.dof;
  const int mais_size = std::max(1, res.bound.mais_size);

  auto adopt = [&](CodingScheme s) {
    s.n = n;
    res.dof = s.dof();
    res.method = s.method;
    res.scheme = std::move(s);
  };
  auto improves = [&](int b, int c) { return Rational(b, c) > res.dof; };

  if (cfg.use_osia) {
    for (int c = std::max(1, mais_size); improves(1, c); ++c) {
      auto r = local_coloring_exact(g, c, cfg.coloring_budget);
      res.attempts.push_back({Method::OSIA, 1, c, r.found(), r.budget_hit});
      if (r.value) {
        adopt(scheme_from_coloring(g, r.value->colors, c));
        break;
      }
    }
  }
  res.floor_after[Method::OSIA] = res.dof;

  if (cfg.use_ovia) {
    for (int b = 2; b <= cfg.max_b; ++b)
      for (int c = std::max(b, b * mais_size); improves(b, c); ++c) {
        auto r = fractional_local_coloring(g, b, c, cfg.coloring_budget);
        res.attempts.push_back({Method::OVIA, b, c, r.found(), r.budget_hit});
        if (r.value) {
          adopt(scheme_from_coloring(g, *r.value, c));
          break;
        }
      }
  }
  res.floor_after[Method::OVIA] = res.dof;

  if (cfg.use_ssia) {
    for (int b = 1; b <= cfg.max_b_subspace; ++b)
      for (int c = std::max(b, b * mais_size); improves(b, c) && c <= kBinaryVectorCap; ++c) {
        auto r = subspace_search(g, b, c, 1, cfg.subspace_budget, cfg.trials, cfg.seed);
        res.attempts.push_back({b == 1 ? Method::SSIA : Method::SVIA, b, c, r.found(), r.budget_hit});
        if (r.value) {
          adopt(std::move(*r.value));
          break;
        }
      }
  }
  res.floor_after[Method::SSIA] = res.dof;

  if (n > 1 && cfg.use_simo) {
    for (int b = 1; b <= cfg.simo_max_b; ++b)
      for (int c = b; improves(b, c); ++c) {
        auto r = simo_search(g, b, c, n, cfg.simo_budget);
        res.attempts.push_back({b == 1 ? Method::SIMO_SCALAR : Method::SIMO_VECTOR, b, c, r.found(), r.budget_hit});
        if (r.value) {
          adopt(std::move(*r.value));
          break;
        }
      }
    if (cfg.simo_subspace)
      for (int c = 1; improves(1, c) && c <= kBinaryVectorCap; ++c) {
        auto r = subspace_search(g, 1, c, n, cfg.subspace_budget, cfg.trials, cfg.seed);
        res.attempts.push_back({Method::SIMO_SCALAR, 1, c, r.found(), r.budget_hit});
        if (r.value) {
          adopt(std::move(*r.value));
          break;
        }
      }
    res.floor_after[Method::SIMO_SCALAR] = res.dof;
  }
  return res;
}

}  // namespace tim
