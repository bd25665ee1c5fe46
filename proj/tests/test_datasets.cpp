#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tim/datasets.hpp"

using namespace tim;

TEST(Er, EdgeFrequencyWithinThreeSigma) {
  const int k = 30;
  const double p = 0.3;
  long edges = 0;
  const int graphs = 40;
  for (int s = 0; s < graphs; ++s) edges += gen_er(k, p, s).edge_count();
  const double trials = static_cast<double>(graphs) * k * (k - 1);
  const double sigma = std::sqrt(trials * p * (1 - p));
  EXPECT_NEAR(static_cast<double>(edges), trials * p, 3 * sigma);
}

TEST(Er, DeterministicAndExtremes) {
  EXPECT_EQ(tim::test::edge_set(gen_er(12, 0.4, 7)), tim::test::edge_set(gen_er(12, 0.4, 7)));
  EXPECT_NE(tim::test::edge_set(gen_er(12, 0.4, 7)), tim::test::edge_set(gen_er(12, 0.4, 8)));
  EXPECT_EQ(gen_er(6, 0.0, 1).edge_count(), 0);
  EXPECT_EQ(gen_er(6, 1.0, 1).edge_count(), 30);
  EXPECT_THROW(gen_er(5, 1.5, 0), Error);
  EXPECT_THROW(gen_er(-1, 0.5, 0), Error);
  EXPECT_THROW(gen_er(5, 0.5, 0, 0.0), Error);
}

TEST(Er, KeepProbabilityDropsNodes) {
  long kept = 0;
  for (int s = 0; s < 200; ++s) kept += gen_er(20, 0.2, s, 0.5).size();
  const double sigma = std::sqrt(4000 * 0.25);
  EXPECT_NEAR(static_cast<double>(kept), 2000.0, 3 * sigma);
}

TEST(Wireless, PathLossIsMonotoneAndContinuous) {
  WirelessParams wp;
  double prev = -1e9;
  for (double d = 0.5; d < 2000; d *= 1.1) {
    const double l = los_path_loss_db(d, wp);
    EXPECT_GE(l, prev - 1e-12);
    prev = l;
  }
  const double rbp = wp.breakpoint();
  EXPECT_NEAR(los_path_loss_db(rbp * (1 - 1e-9), wp), los_path_loss_db(rbp * (1 + 1e-9), wp), 1e-6);
  // 20 dB per decade below the breakpoint, 40 above
  EXPECT_NEAR(los_path_loss_db(rbp / 10, wp), los_path_loss_db(rbp, wp) - 20, 1e-9);
  EXPECT_NEAR(los_path_loss_db(rbp * 10, wp), los_path_loss_db(rbp, wp) + 40, 1e-9);
  EXPECT_DOUBLE_EQ(los_path_loss_db(0.1, wp), los_path_loss_db(wp.min_link_dist, wp));
}

TEST(Wireless, DensityCountAndLayout) {
  for (double density : {0.1, 0.25, 0.5}) {
    auto [lay, topo] = gen_wireless(12, density, 3);
    const auto g = build_conflict_graph(topo);
    EXPECT_EQ(g.edge_count(), static_cast<int>(std::ceil(density * 12 * 11 - 1e-9)));
    for (int i = 0; i < 12; ++i) {
      const double d = distance(lay.tx[i], lay.rx[i]);
      EXPECT_GE(d, lay.params.min_dist - 1e-9);
      EXPECT_LE(d, lay.params.max_dist + 1e-9);
      EXPECT_GE(lay.rx[i].x, 0);
      EXPECT_LE(lay.rx[i].y, lay.params.area);
    }
  }
}

TEST(Wireless, KeepsStrongestLinks) {
  auto [lay, topo] = gen_wireless(10, 0.3, 4);
  const auto g = build_conflict_graph(topo);
  double weakest_kept = 1e300, strongest_dropped = 0;
  for (int j = 0; j < 10; ++j)
    for (int i = 0; i < 10; ++i) {
      if (i == j) continue;
      EXPECT_EQ(g.has_edge(i, j), topo(j, i) == 1);
      if (topo(j, i))
        weakest_kept = std::min(weakest_kept, lay.gain[j][i]);
      else
        strongest_dropped = std::max(strongest_dropped, lay.gain[j][i]);
    }
  EXPECT_GE(weakest_kept, strongest_dropped);
  EXPECT_THROW(gen_wireless(5, 1.0, 0), Error);
}

TEST(Wireless, Deterministic) {
  auto a = gen_wireless(8, 0.2, 9);
  auto b = gen_wireless(8, 0.2, 9);
  EXPECT_EQ(a.second.rows(), b.second.rows());
}

TEST(Partition, BinsByChromaticNumber) {
  std::vector<ConflictGraph> gs;
  for (int s = 0; s < 30; ++s) gs.push_back(gen_er(8, 0.3, s));
  auto all = partition_by_chromatic(gs);
  std::size_t total = 0;
  for (const auto& [chi, bucket] : all) {
    total += bucket.size();
    for (const auto& g : bucket) EXPECT_EQ(chromatic_number(underlying_undirected(g)), chi);
  }
  EXPECT_EQ(total, gs.size());
  auto only3 = partition_by_chromatic(gs, {3});
  EXPECT_LE(only3.size(), 1u);
  EXPECT_THROW(partition_by_chromatic({ConflictGraph(50)}), Error);
}

TEST(Partition, GenerateWithChromatic) {
  auto gs = gen_er_with_chromatic(10, 0.3, 4, 5, 11);
  ASSERT_EQ(gs.size(), 5u);
  for (const auto& g : gs) EXPECT_EQ(chromatic_number(underlying_undirected(g)), 4);
  EXPECT_THROW(gen_er_with_chromatic(3, 0.3, 5, 1, 0, 50), Error);
}
