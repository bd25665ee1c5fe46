#include <gtest/gtest.h>

#include <functional>

#include "rank_oracle.hpp"
#include "test_util.hpp"
#include "tim/io.hpp"

using namespace tim;
using tim::test::graph1;
using tim::test::triangle_into_fourth;

namespace {

std::string fixture(const std::string& name) { return std::string(TIM_FIXTURE_DIR) + "/" + name; }

int pattern_oracle(const std::vector<std::uint32_t>& ps, int c) {
  tim::test::Dense m(c, std::vector<std::int64_t>(ps.size()));
  for (std::size_t k = 0; k < ps.size(); ++k)
    for (int x = 0; x < c; ++x) m[x][k] = (ps[k] >> x) & 1u;
  return tim::test::minor_rank(m);
}

CodingScheme from_palette(const ConflictGraph& g, const std::vector<int>& assign, int c, int s, int n) {
  const auto palette = gen_generic_vectors(c, s);
  CodingScheme sc;
  sc.c = c;
  sc.n = n;
  sc.method = Method::SIMO_SCALAR;
  sc.assignment.resize(g.size());
  for (int v = 0; v < g.size(); ++v) sc.assignment[v] = {palette.vectors[assign[v] - 1]};
  return sc;
}

// Exhaustive search over unordered pattern pairs per node.
bool pair_scheme_oracle(const ConflictGraph& g, int c) {
  const int k = g.size();
  const std::uint32_t count = (1u << c) - 1u;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t p = 1; p <= count; ++p)
    for (std::uint32_t q = p + 1; q <= count; ++q) pairs.emplace_back(p, q);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pick(k);
  auto node_ok = [&](int j) {
    std::vector<std::uint32_t> interf;
    for (Node i : g.in_neighbors(j)) {
      interf.push_back(pick[i].first);
      interf.push_back(pick[i].second);
    }
    auto all = interf;
    all.push_back(pick[j].first);
    all.push_back(pick[j].second);
    return pattern_oracle(all, c) - pattern_oracle(interf, c) == 2;
  };
  std::function<bool(int)> go = [&](int v) {
    if (v == k) return true;
    for (auto pq : pairs) {
      pick[v] = pq;
      bool ok = true;
      // check every node whose closed in-neighborhood is now decided
      for (int j = 0; j <= v && ok; ++j) {
        bool ready = true;
        for (Node i : g.in_neighbors(j)) ready = ready && i <= v;
        if (ready && (j == v || std::find(g.in_neighbors(j).begin(), g.in_neighbors(j).end(), v) !=
                                    g.in_neighbors(j).end()))
          ok = node_ok(j);
      }
      if (ok && go(v + 1)) return true;
    }
    return false;
  };
  return go(0);
}

void expect_sound(const ConflictGraph& g, const LadderResult& r) {
  EXPECT_TRUE(verify(g, r.scheme).valid);
  // the MAIS bound only covers single-antenna receivers
  if (r.scheme.n == 1) {
    EXPECT_LE(r.dof, r.bound.bound);
  }
  EXPECT_EQ(r.dof, r.scheme.dof());
}

}  // namespace

TEST(PatternBasis, MatchesMinorRank) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    const int c = 1 + t % 7;
    std::uniform_int_distribution<std::uint32_t> pat(1, (1u << c) - 1);
    std::vector<std::uint32_t> ps(1 + t % 8);
    for (auto& p : ps) p = pat(rng);
    EXPECT_EQ(detail::pattern_rank(ps, c), pattern_oracle(ps, c));
    detail::PatternBasis basis(c);
    for (std::size_t k = 0; k + 1 < ps.size(); ++k) basis.insert(ps[k]);
    std::vector<std::uint32_t> head(ps.begin(), ps.end() - 1);
    EXPECT_EQ(basis.contains(ps.back()), pattern_oracle(head, c) == pattern_oracle(ps, c));
  }
}

TEST(PatternBasis, FullDimensionPatterns) {
  // Sixteen patterns that form a basis of the 16-dimensional space.
  detail::PatternBasis basis(16);
  for (int x = 0; x < 16; ++x) EXPECT_TRUE(basis.insert((2u << x) - 1));
  EXPECT_EQ(basis.rank(), 16);
  EXPECT_TRUE(basis.contains(0xBEEF));
}

TEST(Verify, HandBuiltTriangleScheme) {
  const auto g = triangle_into_fourth();
  const auto s = scheme_from_json(read_json_file(fixture("ssia_triangle_scheme.json")), 4);
  const auto rep = verify(g, s);
  EXPECT_TRUE(rep.valid);
  EXPECT_EQ(rep.dof, Rational(1, 3));
  EXPECT_EQ(rep.per_node[3].rank_i, 2);
  EXPECT_EQ(rep.per_node[3].rank_s, 3);
  for (int v = 0; v < 4; ++v) EXPECT_EQ(desired_space_ranks(g, s, v), std::make_pair(1, 0));
}

TEST(Verify, BrokenSchemeNamesFailingNode) {
  const auto g = triangle_into_fourth();
  const auto s = scheme_from_json(read_json_file(fixture("ssia_triangle_scheme_broken.json")), 4);
  const auto rep = verify(g, s);
  EXPECT_FALSE(rep.valid);
  EXPECT_EQ(rep.failing_nodes(), std::vector<Node>{3});
  EXPECT_EQ(desired_space_ranks(g, s, 3), std::make_pair(1, 1));
}

TEST(Verify, ShapeErrors) {
  const auto g = triangle_into_fourth();
  auto s = scheme_from_json(read_json_file(fixture("ssia_triangle_scheme.json")), 4);
  auto wrong_dim = s;
  wrong_dim.assignment[2][0].push_back(0);
  EXPECT_THROW(verify(g, wrong_dim), Error);
  auto missing = s;
  missing.assignment.pop_back();
  EXPECT_THROW(verify(g, missing), Error);
  auto too_many = s;
  too_many.b = 4;
  EXPECT_THROW(verify(g, too_many), Error);
}

TEST(Tdma, ValidWithChromaticDimension) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    auto g = tim::test::random_graph(2 + t % 8, 0.3, rng);
    auto s = tdma_scheme(g);
    EXPECT_TRUE(verify(g, s).valid);
    EXPECT_EQ(s.c, chromatic_number(underlying_undirected(g)));
  }
}

TEST(SchemeFromColoring, RejectsTooNarrowSpace) {
  const auto g = triangle_into_fourth();
  EXPECT_THROW(scheme_from_coloring(g, std::vector<int>{1, 2, 3, 4}, 3), Error);
  auto s = scheme_from_coloring(g, std::vector<int>{1, 2, 3, 4}, 4);
  EXPECT_TRUE(verify(g, s).valid);
}

TEST(Subspace, TriangleNeedsThreeDimensions) {
  const auto g = triangle_into_fourth();
  EXPECT_TRUE(subspace_search(g, 1, 2).proven_infeasible());
  auto r = subspace_search(g, 1, 3);
  ASSERT_TRUE(r.found());
  EXPECT_TRUE(verify(g, *r.value).valid);
  EXPECT_EQ(r.value->method, Method::SSIA);
  // Orthogonal or colored access would need four dimensions here.
  EXPECT_FALSE(local_coloring_exact(g, 3).found());
}

TEST(Subspace, FoundSchemesVerifyAndAgreeWithExhaustion) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 60; ++t) {
    auto g = tim::test::random_graph(3 + t % 4, 0.4, rng);
    const int lo = std::max(1, mais(g).mais_size);
    for (int c = lo; c <= lo + 1; ++c) {
      auto r = subspace_search(g, 1, c);
      ASSERT_FALSE(r.budget_hit);
      if (r.found()) {
        EXPECT_TRUE(verify(g, *r.value).valid);
      }
      // any proper local coloring of width c is a binary scheme too
      if (local_coloring_exact(g, c).found()) {
        EXPECT_TRUE(r.found());
      }
    }
  }
}

TEST(Subspace, TwoStreamSearchAgreesWithExhaustion) {
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    const int k = 3 + t % 2;
    auto g = tim::test::random_graph(k, 0.5, rng);
    for (int c : {3, 4}) {
      if (k == 4 && c == 4) continue;
      auto r = subspace_search(g, 2, c);
      ASSERT_FALSE(r.budget_hit);
      EXPECT_EQ(r.found(), pair_scheme_oracle(g, c)) << "trial " << t << " c " << c;
      if (r.found()) {
        EXPECT_TRUE(verify(g, *r.value).valid);
      }
    }
  }
}

TEST(Subspace, VectorSchemesVerify) {
  std::mt19937_64 rng(14);
  for (int t = 0; t < 10; ++t) {
    auto g = tim::test::random_graph(4, 0.4, rng);
    const int c = 2 * std::max(1, mais(g).mais_size) + 1;
    auto r = subspace_search(g, 2, c, 1, 200000);
    if (r.found()) {
      EXPECT_TRUE(verify(g, *r.value).valid);
      EXPECT_EQ(r.value->b, 2);
    }
  }
}

TEST(Subspace, BudgetIsReported) {
  std::mt19937_64 rng(15);
  auto g = tim::test::random_graph(12, 0.5, rng);
  auto r = subspace_search(g, 1, 4, 1, 10);
  EXPECT_TRUE(r.budget_hit || r.found());
  EXPECT_FALSE(r.proven_infeasible() && r.budget_hit);
}

TEST(Simo, CheckAgreesWithRanksOnBasisPalette) {
  std::mt19937_64 rng(16);
  for (int t = 0; t < 120; ++t) {
    auto g = tim::test::random_graph(3 + t % 4, 0.5, rng);
    const int n = 2 + t % 2;
    const int c = 2 + t % 3;
    std::uniform_int_distribution<int> pick(1, c);
    std::vector<int> a(g.size());
    for (auto& x : a) x = pick(rng);
    EXPECT_EQ(simo_scalar_check(g, a, c, n), verify(g, from_palette(g, a, c, c, n)).valid);
  }
}

TEST(Simo, CheckIsSoundOnLargerPalette) {
  std::mt19937_64 rng(17);
  int passed = 0;
  for (int t = 0; t < 200; ++t) {
    auto g = tim::test::random_graph(4 + t % 3, 0.35, rng);
    const int n = 2;
    const int c = 2 + t % 2;
    const int s = c + 1 + t % 3;
    std::uniform_int_distribution<int> pick(1, s);
    std::vector<int> a(g.size());
    for (auto& x : a) x = pick(rng);
    if (!simo_scalar_check(g, a, c, n)) continue;
    ++passed;
    EXPECT_TRUE(verify(g, from_palette(g, a, c, s, n)).valid);
  }
  EXPECT_GT(passed, 0);
}

TEST(Simo, SearchResultsVerify) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 40; ++t) {
    auto g = tim::test::random_graph(5, 0.4, rng);
    for (int c = 1; c <= 3; ++c) {
      auto r = simo_search(g, 1, c, 2);
      if (r.found()) {
        EXPECT_TRUE(verify(g, *r.value).valid);
        break;
      }
    }
  }
}

TEST(Ladder, SoundOnRandomGraphs) {
  std::mt19937_64 rng(19);
  for (int t = 0; t < 40; ++t) {
    auto g = tim::test::random_graph(3 + t % 5, 0.3 + 0.1 * (t % 3), rng);
    auto r = best_scheme(g);
    expect_sound(g, r);
    EXPECT_LE(r.floor_after.at(Method::TDMA), r.floor_after.at(Method::OSIA));
    EXPECT_LE(r.floor_after.at(Method::OSIA), r.floor_after.at(Method::OVIA));
    EXPECT_LE(r.floor_after.at(Method::OVIA), r.floor_after.at(Method::SSIA));
  }
}

struct FixtureCase {
  std::string file;
  int n;
  Rational dof;
  Method method;
};

class LadderFixture : public ::testing::TestWithParam<FixtureCase> {};

TEST_P(LadderFixture, ReachesExpectedDof) {
  const auto& fc = GetParam();
  const auto g = load_instance(fixture(fc.file)).graph;
  const auto r = best_scheme(g, fc.n);
  expect_sound(g, r);
  EXPECT_EQ(r.dof, fc.dof);
  EXPECT_EQ(r.method, fc.method);
}

INSTANTIATE_TEST_SUITE_P(
    Fixtures, LadderFixture,
    ::testing::Values(FixtureCase{"osia_five.json", 1, Rational(1, 2), Method::OSIA},
                      FixtureCase{"osia_six.json", 1, Rational(1, 3), Method::OSIA},
                      FixtureCase{"ovia_pentagon.json", 1, Rational(2, 5), Method::OVIA},
                      FixtureCase{"ssia_triangle.json", 1, Rational(1, 3), Method::SSIA},
                      FixtureCase{"ssia_odd_hole.json", 1, Rational(1, 3), Method::SSIA},
                      FixtureCase{"ssia_clique.json", 1, Rational(1, 3), Method::SSIA},
                      FixtureCase{"simo_clique.json", 1, Rational(1, 3), Method::OSIA},
                      FixtureCase{"simo_clique.json", 2, Rational(1, 2), Method::SIMO_SCALAR},
                      FixtureCase{"simo_large.json", 1, Rational(1, 6), Method::OSIA},
                      FixtureCase{"simo_large.json", 2, Rational(1, 4), Method::SIMO_SCALAR},
                      FixtureCase{"simo_large.json", 3, Rational(1, 3), Method::SIMO_SCALAR}),
    [](const auto& info) {
      auto name = info.param.file.substr(0, info.param.file.find('.'));
      return name + "_n" + std::to_string(info.param.n);
    });

TEST(Ladder, TwoStreamTriangleLeavesGap) {
  const auto g = load_instance(fixture("svia_triangle.json")).graph;
  LadderConfig cfg;
  cfg.max_b_subspace = 2;
  cfg.subspace_budget = 20000;
  const auto r = best_scheme(g, 1, cfg);
  expect_sound(g, r);
  EXPECT_EQ(r.dof, Rational(2, 7));
  EXPECT_EQ(r.method, Method::SVIA);
  EXPECT_EQ(r.bound.bound, Rational(1, 3));
  EXPECT_FALSE(r.optimal());
  // the default ladder stops at one stream
  EXPECT_EQ(best_scheme(g).dof, Rational(1, 4));
}

TEST(Ladder, DisabledStagesFallBack) {
  const auto g = load_instance(fixture("ssia_triangle.json")).graph;
  LadderConfig cfg;
  cfg.use_ssia = false;
  auto r = best_scheme(g, 1, cfg);
  EXPECT_EQ(r.dof, Rational(1, 4));
  EXPECT_FALSE(r.optimal());
}
