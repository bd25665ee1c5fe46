// Randomized search for small conflict graphs that satisfy a set of structural
// constraints and whose ladder results match target DoF values. Used to build
// the graphs under fixtures/.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "tim/io.hpp"

using namespace tim;

namespace {

struct Spec {
  int k = 0;
  std::vector<Edge> required;
  std::vector<std::pair<Node, Node>> forbidden;  // unordered pairs with no edge in either direction
  std::vector<std::pair<Node, Node>> adjacent;   // unordered pairs that need an edge in some direction
  double p = 0.3;
};

// 1-based literals to 0-based edges.
std::vector<Edge> edges1(std::initializer_list<Edge> es) {
  std::vector<Edge> out;
  for (auto [a, b] : es) out.emplace_back(a - 1, b - 1);
  return out;
}

ConflictGraph draw(const Spec& s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  ConflictGraph g(s.k);
  auto banned = [&](Node a, Node b) {
    for (auto [x, y] : s.forbidden)
      if ((x == a && y == b) || (x == b && y == a)) return true;
    return false;
  };
  for (auto [a, b] : s.required) g.add_edge(a, b);
  for (auto [a, b] : s.adjacent)
    if (!g.adjacent(a, b)) {
      const int pick = static_cast<int>(u(rng) * 3);
      if (pick != 1) g.add_edge(a, b);
      if (pick != 0) g.add_edge(b, a);
    }
  for (int i = 0; i < s.k; ++i)
    for (int j = 0; j < s.k; ++j)
      if (i != j && !g.has_edge(i, j) && !banned(i, j) && u(rng) < s.p) g.add_edge(i, j);
  return g;
}

int chi(const ConflictGraph& g) { return chromatic_number(underlying_undirected(g)); }

bool ladder_is(const ConflictGraph& g, int n, Rational want, std::optional<Method> method = std::nullopt,
               LadderConfig cfg = {}) {
  cfg.coloring_budget = cfg.subspace_budget = cfg.simo_budget = 200000;
  const auto r = best_scheme(g, n, cfg);
  for (const auto& a : r.attempts)
    if (a.budget_hit) return false;
  if (r.dof != want) return false;
  if (method && r.method != *method) return false;
  return verify(g, r.scheme).valid;
}

// Exists a proper coloring with at most `palette` colors and local width <= w
// where nodes a and b share a color.
bool shared_color_coloring(const ConflictGraph& g, int palette, int w, Node a, Node b) {
  std::vector<int> col(g.size(), 1);
  const auto u = underlying_undirected(g);
  while (true) {
    if (col[a] == col[b] && is_proper(u, col) && palette_size(col) <= palette && local_width(g, col) <= w) return true;
    int i = 0;
    while (i < g.size() && col[i] == palette) col[i++] = 1;
    if (i == g.size()) return false;
    ++col[i];
  }
}

std::optional<ConflictGraph> search(const std::string& name, const Spec& s, std::uint64_t seed, long tries,
                                    const std::function<bool(const ConflictGraph&)>& ok) {
  std::mt19937_64 rng(seed);
  for (long t = 0; t < tries; ++t) {
    auto g = draw(s, rng);
    if (ok(g)) {
      std::cerr << name << ": found after " << t + 1 << " draws, " << g.edge_count() << " edges\n";
      return g;
    }
  }
  std::cerr << name << ": nothing in " << tries << " draws\n";
  return std::nullopt;
}

// 8-node core whose underlying graph is complete.
std::optional<ConflictGraph> simo_core(std::uint64_t seed, long tries) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  for (long t = 0; t < tries; ++t) {
    ConflictGraph g(8);
    for (int i = 0; i < 8; ++i)
      for (int j = i + 1; j < 8; ++j) {
        const double x = u(rng);
        if (x < 0.4) g.add_edge(i, j);
        else if (x < 0.8) g.add_edge(j, i);
        else {
          g.add_edge(i, j);
          g.add_edge(j, i);
        }
      }
    int max_in = 0;
    for (int v = 0; v < 8; ++v) max_in = std::max(max_in, g.in_degree(v));
    if (max_in != 5 || mais(g).mais_size != 6) continue;
    auto s23 = simo_scalar_search(g, 3, 2, kUnlimited);
    auto s24 = simo_scalar_search(g, 4, 2, kUnlimited);
    auto s32 = simo_scalar_search(g, 2, 3, kUnlimited);
    auto s33 = simo_scalar_search(g, 3, 3, kUnlimited);
    if (s23.proven_infeasible() && s24.found() && s32.proven_infeasible() && s33.found()) {
      std::cerr << "core: found after " << t + 1 << " draws\n";
      return g;
    }
  }
  return std::nullopt;
}

void save(const std::string& dir, const std::string& name, const ConflictGraph& g) {
  write_json_file(dir + "/" + name + ".json", graph_to_json(g));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixture graph search"};
  std::string out = "fixtures";
  std::uint64_t seed = 1;
  long tries = 20000;
  std::vector<std::string> only;
  app.add_option("--out", out);
  app.add_option("--seed", seed);
  app.add_option("--tries", tries);
  app.add_option("--only", only);
  CLI11_PARSE(app, argc, argv);
  std::filesystem::create_directories(out);
  auto want = [&](const std::string& n) { return only.empty() || std::find(only.begin(), only.end(), n) != only.end(); };

  if (want("osia_five")) {
    Spec s{5, edges1({{1, 4}, {3, 4}}), {}, {{3, 4}}, 0.3};
    const std::vector<int> colors{1, 2, 1, 3, 2};
    auto g = search("osia_five", s, seed, tries, [&](const ConflictGraph& g) {
      return is_proper(underlying_undirected(g), colors) && local_width(g, colors) <= 2 && chi(g) == 3 &&
             mais(g).mais_size == 2 && ladder_is(g, 1, Rational(1, 2), Method::OSIA);
    });
    if (g) save(out, "osia_five", *g);
  }
  if (want("osia_six")) {
    Spec s{6, edges1({{1, 2}, {1, 3}, {1, 6}, {5, 2}, {5, 3}, {5, 6}}), {{0, 4}}, {}, 0.35};
    auto g = search("osia_six", s, seed, tries, [&](const ConflictGraph& g) {
      return chi(g) == 4 && mais(g).mais_size == 3 && ladder_is(g, 1, Rational(1, 3), Method::OSIA) &&
             shared_color_coloring(g, 4, 3, 0, 4);
    });
    if (g) save(out, "osia_six", *g);
  }
  if (want("ovia_pentagon")) {
    Spec s{5, edges1({{1, 2}, {3, 2}, {1, 5}, {4, 5}}), {{0, 2}, {0, 3}, {1, 3}, {1, 4}, {2, 4}}, {{2, 3}}, 0.0};
    auto g = search("ovia_pentagon", s, seed, 200, [&](const ConflictGraph& g) {
      const std::vector<std::vector<int>> two_fold{{1, 2}, {3, 5}, {2, 4}, {1, 5}, {3, 4}};
      return fractional_local_width(g, two_fold) <= 5 && ladder_is(g, 1, Rational(2, 5), Method::OVIA) &&
             best_scheme(g).floor_after.at(Method::OSIA) == Rational(1, 3);
    });
    if (g) save(out, "ovia_pentagon", *g);
  }
  if (want("ssia_triangle")) {
    save(out, "ssia_triangle", ConflictGraph(4, edges1({{1, 2}, {2, 3}, {3, 1}, {1, 4}, {2, 4}, {3, 4}})));
  }
  if (want("simo_clique")) {
    for (int k : {5, 6}) {
      Spec s{k, {}, {}, {}, 0.45};
      auto g = search("simo_clique", s, seed + k, tries, [&](const ConflictGraph& g) {
        return chi(g) == 4 && mais(g).mais_size == 3 && ladder_is(g, 1, Rational(1, 3), Method::OSIA) &&
               ladder_is(g, 2, Rational(1, 2));
      });
      if (g) {
        save(out, "simo_clique", *g);
        break;
      }
    }
  }
  if (want("simo_large")) {
    std::vector<ConflictGraph> cores;
    for (std::uint64_t sd = seed; cores.size() < 3; sd += 101)
      if (auto c = simo_core(sd, tries)) cores.push_back(*c);
    ConflictGraph g(25);
    for (int c = 0; c < 3; ++c)
      for (auto [i, j] : cores[c].edges()) g.add_edge(8 * c + i, 8 * c + j);
    // relabel so the components interleave
    std::vector<int> perm(25);
    for (int v = 0; v < 25; ++v) perm[v] = v;
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    ConflictGraph h(25);
    for (auto [i, j] : g.edges()) h.add_edge(perm[i], perm[j]);
    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = ladder_is(h, 1, Rational(1, 6)) && ladder_is(h, 2, Rational(1, 4)) && ladder_is(h, 3, Rational(1, 3));
    std::cerr << "simo_large: " << (ok ? "ok" : "MISMATCH") << " in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
    if (ok) save(out, "simo_large", h);
  }
  if (want("svia_triangle")) {
    // Directed triangle 1 -> 2 -> 3 -> 1 all pointing at 4, reverse edges banned.
    Spec s{6, edges1({{1, 2}, {2, 3}, {3, 1}, {1, 4}, {2, 4}, {3, 4}}),
           {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 3}, {2, 3}}, {}, 0.4};
    auto g = search("svia_triangle", s, seed, tries, [&](const ConflictGraph& g) {
      if (mais(g).mais_size != 3) return false;
      // the c = 6 two-stream search may stay open; c = 7 must close within budget
      LadderConfig cfg;
      cfg.max_b_subspace = 2;
      cfg.subspace_budget = 20000;
      const auto r = best_scheme(g, 1, cfg);
      return r.dof == Rational(2, 7) && r.method == Method::SVIA && verify(g, r.scheme).valid;
    });
    if (g) save(out, "svia_triangle", *g);
  }
  if (want("ssia_odd_hole")) {
    Spec s{7, {}, {{0, 2}, {0, 3}, {1, 3}, {1, 4}, {2, 4}, {6, 3}, {6, 4}},
           {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}, {0, 6}, {6, 2}}, 0.3};
    auto g = search("ssia_odd_hole", s, seed, tries, [&](const ConflictGraph& g) {
      return underlying_undirected(g).degree(5) > 0 && mais(g).mais_size == 3 &&
             ladder_is(g, 1, Rational(1, 3), Method::SSIA);
    });
    if (g) save(out, "ssia_odd_hole", *g);
  }
  if (want("ssia_clique")) {
    Spec s{7, edges1({{2, 3}, {7, 3}, {4, 3}, {3, 5}, {4, 5}, {7, 5}}), {}, {{0, 1}, {0, 2}, {0, 6}, {1, 6}}, 0.3};
    auto g = search("ssia_clique", s, seed, tries, [&](const ConflictGraph& g) {
      return underlying_undirected(g).degree(5) > 0 && mais(g).mais_size == 3 &&
             ladder_is(g, 1, Rational(1, 3), Method::SSIA);
    });
    if (g) save(out, "ssia_clique", *g);
  }
  return 0;
}
