#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tim/bounds.hpp"

using namespace tim;

TEST(Mais, TriangleIntoFourth) {
  auto b = mais(tim::test::triangle_into_fourth());
  EXPECT_EQ(b.mais_size, 3);
  EXPECT_EQ(b.bound, Rational(1, 3));
  EXPECT_EQ(b.witness, (std::vector<Node>{0, 1, 3}));
}

TEST(Mais, CompleteAndEmpty) {
  for (int k = 1; k <= 6; ++k) {
    auto full = mais(complement(ConflictGraph(k)));
    EXPECT_EQ(full.mais_size, k);
    EXPECT_EQ(full.bound, Rational(1, k));
    EXPECT_EQ(mais(ConflictGraph(k)).mais_size, 1);
  }
  EXPECT_EQ(mais(ConflictGraph(0)).mais_size, 0);
}

TEST(Mais, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 400; ++t) {
    const int k = 1 + t % 10;
    auto g = tim::test::random_graph(k, 0.2 + 0.1 * (t % 6), rng);
    auto b = mais(g);
    auto [size, witness] = tim::test::mais_oracle(g);
    ASSERT_EQ(b.mais_size, size);
    EXPECT_EQ(b.witness, witness);
    EXPECT_TRUE(is_acyclic_induced(complement(g), b.witness));
    EXPECT_EQ(static_cast<int>(b.witness.size()), b.mais_size);
  }
}

TEST(Mais, MonotoneUnderEdgeAddition) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    auto g = tim::test::random_graph(8, 0.3, rng);
    const int before = mais(g).mais_size;
    std::uniform_int_distribution<int> pick(0, 7);
    int i = pick(rng), j = pick(rng);
    if (i == j) continue;
    g.add_edge(i, j);
    EXPECT_GE(mais(g).mais_size, before);
  }
}

TEST(Mais, OverCapThrows) {
  EXPECT_THROW(mais(ConflictGraph(31)), Error);
  EXPECT_NO_THROW(mais(ConflictGraph(12), 12));
}

TEST(SelectInitialC, Formula) {
  EXPECT_EQ(select_initial_c(tim::test::triangle_into_fourth(), 1), 3);
  EXPECT_EQ(select_initial_c(ConflictGraph(4), 1), 1);
  DofBound two{2, Rational(1, 2), {}};
  EXPECT_EQ(select_initial_c(two, 2), 4);
  EXPECT_THROW(select_initial_c(two, 0), Error);
  for (int m = 1; m <= 6; ++m)
    for (int b = 1; b <= 4; ++b) {
      DofBound d{m, Rational(1, m), {}};
      const int c = select_initial_c(d, b);
      EXPECT_LE(Rational(b, c), d.bound);
      EXPECT_TRUE(c == b || Rational(b, c - 1) > d.bound);
    }
}
