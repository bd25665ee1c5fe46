#pragma once

// Learn-to-defer decision process. A state labels every node with a palette
// index in 1..S or 0 (deferred); an action labels the deferred nodes; the
// transition overwrites the deferred entries (update) and then returns to
// deferred every neighborhood that breaks the alignment condition, or every
// endpoint of a monochromatic edge in coloring mode (clean-up).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tim/coloring.hpp"
#include "tim/exact_linalg.hpp"
#include "tim/graph.hpp"
#include "tim/ia.hpp"

namespace tim {

inline constexpr int kKeep = -1;  // action entry for a fixed node

enum class EnvKind { IA, Coloring };

struct EnvConfig {
  EnvKind kind = EnvKind::Coloring;
  int b = 1;  // IA: streams per message (the environment runs on the split graph)
  int c = 1;  // IA: coding-space dimension
  int n = 1;  // IA: receive antennas
  int limit = 32;
  double beta = 1.0;
  int trials = kDefaultTrials;
  std::uint64_t seed = 0;
};

struct EnvState {
  std::vector<int> node_state;
  int t = 0;

  int fixed_count() const {
    return static_cast<int>(std::count_if(node_state.begin(), node_state.end(), [](int s) { return s != 0; }));
  }
  std::vector<Node> deferred() const {
    std::vector<Node> out;
    for (int v = 0; v < static_cast<int>(node_state.size()); ++v)
      if (node_state[v] == 0) out.push_back(v);
    return out;
  }
  bool operator==(const EnvState&) const = default;
};

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  bool done = false;
  std::vector<Node> rolled_back;
  std::vector<Node> newly_fixed;
};

/// (fixed after - fixed before) / |V|.
inline double reward_cardinality(const EnvState& prev, const EnvState& next) {
  const auto k = prev.node_state.size();
  if (k == 0) return 0.0;
  return static_cast<double>(next.fixed_count() - prev.fixed_count()) / static_cast<double>(k);
}

inline double reward_terminal(int t, int limit, double beta) {
  if (t < 0 || t > limit) throw Error("terminal reward: iteration outside [0, L]");
  return beta * static_cast<double>(limit - t) / static_cast<double>(limit);
}

class LcgEnv {
 public:
  /// Coloring mode over `palette` colors, or IA mode over the given vector set
  /// (binary or generic) on the b-order split of `g`.
  LcgEnv(const ConflictGraph& g, int palette, EnvConfig cfg, std::optional<VectorSet> vectors = std::nullopt)
      : cfg_(cfg), base_(g), palette_(palette) {
    if (palette < 1) throw Error("palette size must be >= 1");
    if (cfg_.limit < 1) throw Error("iteration limit must be >= 1");
    if (cfg_.kind == EnvKind::IA) {
      split_ = node_split(g, cfg_.b);
      graph_ = split_.graph;
      vectors_ = vectors ? std::move(*vectors) : gen_binary_vectors(cfg_.c);
      if (vectors_.dim != cfg_.c) throw Error("vector set dimension differs from c");
      if (vectors_.size() < palette_) throw Error("vector set smaller than palette");
    } else {
      graph_ = g;
      split_ = node_split(g, 1);
    }
    undirected_ = underlying_undirected(graph_);
  }

  const ConflictGraph& graph() const { return graph_; }
  const ConflictGraph& base_graph() const { return base_; }
  const UndirectedGraph& undirected() const { return undirected_; }
  const EnvConfig& config() const { return cfg_; }
  int palette() const { return palette_; }
  int size() const { return graph_.size(); }

  EnvState reset() const { return EnvState{std::vector<int>(graph_.size(), 0), 0}; }

  bool terminal(const EnvState& s) const {
    return s.t >= cfg_.limit || std::none_of(s.node_state.begin(), s.node_state.end(), [](int x) { return x == 0; });
  }

  StepOutcome step(const EnvState& state, const std::vector<int>& action) const {
    if (terminal(state)) throw Error("step on a terminal state");
    if (static_cast<int>(action.size()) != graph_.size()) throw Error("action size mismatch");
    StepOutcome out;
    out.next = state;
    for (int v = 0; v < graph_.size(); ++v) {
      const int a = action[v];
      if (state.node_state[v] != 0) {
        if (a != kKeep) throw Error("action on fixed node " + std::to_string(v + 1));
        continue;
      }
      if (a < 0 || a > palette_) throw Error("action value out of range at node " + std::to_string(v + 1));
      out.next.node_state[v] = a;
    }
    std::vector<char> rolled(graph_.size(), 0);
    if (cfg_.kind == EnvKind::Coloring)
      clean_up_coloring(out.next, rolled);
    else
      clean_up_ia(out.next, rolled);
    out.next.t = state.t + 1;
    for (int v = 0; v < graph_.size(); ++v) {
      if (rolled[v]) out.rolled_back.push_back(v);
      if (state.node_state[v] == 0 && out.next.node_state[v] != 0) out.newly_fixed.push_back(v);
    }
    out.done = terminal(out.next);
    out.reward = reward_cardinality(state, out.next);
    if (out.done) out.reward += reward_terminal(out.next.t, cfg_.limit, cfg_.beta);
    return out;
  }

  StepOutcome step(const EnvState& state, const std::map<Node, int>& action) const {
    std::vector<int> full(graph_.size(), kKeep);
    for (auto [v, a] : action) {
      if (v < 0 || v >= graph_.size()) throw Error("unknown node in action");
      full[v] = a;
    }
    for (int v = 0; v < graph_.size(); ++v)
      if (state.node_state[v] == 0 && full[v] == kKeep) throw Error("action misses deferred node " + std::to_string(v + 1));
    return step(state, full);
  }

  /// IA: the closed in-neighborhood of j is fully assigned and violates the
  /// rank condition. Coloring: j shares its color with a neighbor.
  bool violated(const EnvState& s, Node j) const {
    if (s.node_state[j] == 0) return false;
    if (cfg_.kind == EnvKind::Coloring) {
      for (Node u : undirected_.neighbors(j))
        if (s.node_state[u] == s.node_state[j]) return true;
      return false;
    }
    for (Node i : graph_.in_neighbors(j))
      if (s.node_state[i] == 0) return false;
    return !rank_condition(s, j);
  }

  /// Scheme for a completed IA state (split assignments merged back).
  CodingScheme scheme(const EnvState& s) const {
    if (cfg_.kind != EnvKind::IA) throw Error("scheme() requires IA mode");
    const auto merged = merge_split_assignment(split_, s.node_state);
    CodingScheme out;
    out.c = cfg_.c;
    out.b = cfg_.b;
    out.n = cfg_.n;
    out.method = cfg_.n == 1 ? (cfg_.b == 1 ? Method::SSIA : Method::SVIA)
                             : (cfg_.b == 1 ? Method::SIMO_SCALAR : Method::SIMO_VECTOR);
    out.assignment.resize(base_.size());
    for (int v = 0; v < base_.size(); ++v)
      for (int idx : merged[v]) {
        if (idx < 1) throw Error("scheme() on an incomplete state");
        out.assignment[v].push_back(vectors_.vectors[idx - 1]);
      }
    return out;
  }

 private:
  bool rank_condition(const EnvState& s, Node j) const {
    std::vector<IntVector> interf;
    for (Node i : graph_.in_neighbors(j)) interf.push_back(vectors_.vectors[s.node_state[i] - 1]);
    const IntVector& own = vectors_.vectors[s.node_state[j] - 1];
    if (cfg_.n == 1) {
      const int ri = interf.empty() ? 0 : rank(IntMatrix::from_columns(interf, cfg_.c));
      interf.push_back(own);
      return rank(IntMatrix::from_columns(interf, cfg_.c)) == ri + 1;
    }
    std::vector<LiftedBlock> blocks;
    for (auto& v : interf) blocks.push_back({cfg_.n, {v}});
    const auto sd = detail::node_seed(cfg_.seed, j);
    const int ri = generic_rank_lifted(blocks, cfg_.c, cfg_.trials, sd);
    blocks.push_back({cfg_.n, {own}});
    return generic_rank_lifted(blocks, cfg_.c, cfg_.trials, sd) == ri + 1;
  }

  void clean_up_coloring(EnvState& s, std::vector<char>& rolled) const {
    std::vector<Node> clash;
    for (auto [u, v] : undirected_.edges())
      if (s.node_state[u] != 0 && s.node_state[u] == s.node_state[v]) {
        clash.push_back(u);
        clash.push_back(v);
      }
    for (Node v : clash) {
      s.node_state[v] = 0;
      rolled[v] = 1;
    }
  }

  // Ascending sweeps until no fully assigned neighborhood is violated.
  void clean_up_ia(EnvState& s, std::vector<char>& rolled) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (int j = 0; j < graph_.size(); ++j) {
        if (!violated(s, j)) continue;
        s.node_state[j] = 0;
        rolled[j] = 1;
        for (Node i : graph_.in_neighbors(j)) {
          s.node_state[i] = 0;
          rolled[i] = 1;
        }
        changed = true;
      }
    }
  }

  EnvConfig cfg_;
  ConflictGraph base_;
  ConflictGraph graph_;
  SplitGraph split_;
  UndirectedGraph undirected_;
  VectorSet vectors_;
  int palette_ = 1;
};

}  // namespace tim
