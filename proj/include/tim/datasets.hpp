#pragma once

// Instance generators: directed ER conflict graphs, D2D wireless layouts with
// LoS path loss thresholded to a topology, and chromatic-number binning.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "tim/coloring.hpp"
#include "tim/graph.hpp"

namespace tim {

/// Each ordered pair (i, j), i != j, becomes an edge independently with
/// probability p. `keep_prob` < 1 drops each node (as a demanded message)
/// independently before edges are drawn; nodes are renumbered densely.
inline ConflictGraph gen_er(int k, double p, std::uint64_t seed, double keep_prob = 1.0) {
  if (k < 0) throw Error("node count must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw Error("edge probability must lie in [0, 1]");
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw Error("keep probability must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int kept = k;
  if (keep_prob < 1.0) {
    kept = 0;
    for (int v = 0; v < k; ++v)
      if (unit(rng) < keep_prob) ++kept;
  }
  ConflictGraph g(kept);
  for (int i = 0; i < kept; ++i)
    for (int j = 0; j < kept; ++j)
      if (i != j && unit(rng) < p) g.add_edge(i, j);
  return g;
}

struct WirelessParams {
  double area = 1000.0;       // m, square side
  double min_dist = 2.0;      // m
  double max_dist = 65.0;     // m
  double carrier_hz = 2.4e9;
  double antenna_height = 1.5;  // m
  double antenna_gain_db = -2.5;
  double tx_power_dbm = 30.0;
  double noise_dbm_hz = -174.0;
  double noise_figure_db = 7.0;
  double bandwidth_hz = 10e6;
  double min_link_dist = 1.0;  // distances below this are clamped

  double wavelength() const { return 299792458.0 / carrier_hz; }
  double breakpoint() const { return 4.0 * antenna_height * antenna_height / wavelength(); }
  double noise_dbm() const { return noise_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db; }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// LoS lower-bound path loss (dB) with a breakpoint at 4 h_tx h_rx / lambda.
inline double los_path_loss_db(double d, const WirelessParams& wp) {
  const double lambda = wp.wavelength();
  const double h = wp.antenna_height;
  const double rbp = wp.breakpoint();
  const double lbp = std::abs(20.0 * std::log10(lambda * lambda / (8.0 * std::numbers::pi * h * h)));
  d = std::max(d, wp.min_link_dist);
  if (d <= rbp) return lbp + 20.0 * std::log10(d / rbp);
  return lbp + 40.0 * std::log10(d / rbp);
}

/// Received power (dBm) at distance d under full transmit power.
inline double link_gain_dbm(double d, const WirelessParams& wp) {
  return wp.tx_power_dbm + 2.0 * wp.antenna_gain_db - los_path_loss_db(d, wp);
}

struct WirelessLayout {
  std::vector<Point> tx;
  std::vector<Point> rx;
  std::vector<std::vector<double>> gain;  // gain[j][i]: tx i -> rx j, linear
  WirelessParams params;

  int size() const { return static_cast<int>(tx.size()); }
};

/// k pairs in the square; rx at a uniform distance in [min, max] from its tx,
/// direction resampled until inside the area. The topology keeps exactly the
/// ceil(density k (k-1)) strongest cross links (ties by index).
inline std::pair<WirelessLayout, TopologyMatrix> gen_wireless(int k, double density, std::uint64_t seed,
                                                              const WirelessParams& wp = {}) {
  if (k < 1) throw Error("pair count must be >= 1");
  if (!(density > 0.0 && density < 1.0)) throw Error("target density must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, wp.area);
  std::uniform_real_distribution<double> dist(wp.min_dist, wp.max_dist);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  WirelessLayout lay;
  lay.params = wp;
  for (int i = 0; i < k; ++i) {
    Point t{pos(rng), pos(rng)};
    const double d = dist(rng);
    Point r;
    do {
      const double a = angle(rng);
      r = {t.x + d * std::cos(a), t.y + d * std::sin(a)};
    } while (r.x < 0 || r.x > wp.area || r.y < 0 || r.y > wp.area);
    lay.tx.push_back(t);
    lay.rx.push_back(r);
  }
  lay.gain.assign(k, std::vector<double>(k, 0.0));
  struct Cross {
    double db;
    int j, i;
  };
  std::vector<Cross> cross;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      const double db = 2.0 * wp.antenna_gain_db - los_path_loss_db(distance(lay.tx[i], lay.rx[j]), wp);
      lay.gain[j][i] = std::pow(10.0, db / 10.0);
      if (i != j) cross.push_back({db, j, i});
    }
  std::stable_sort(cross.begin(), cross.end(), [](const Cross& a, const Cross& b) { return a.db > b.db; });
  const auto want = static_cast<std::size_t>(std::ceil(density * k * (k - 1) - 1e-9));
  std::vector<std::vector<int>> rows(k, std::vector<int>(k, 0));
  for (int v = 0; v < k; ++v) rows[v][v] = 1;
  for (std::size_t e = 0; e < std::min(want, cross.size()); ++e) rows[cross[e].j][cross[e].i] = 1;
  return {std::move(lay), TopologyMatrix(rows)};
}

/// Bins graphs by the chromatic number of their underlying undirected graph;
/// graphs whose chromatic number is outside `bins` are dropped (an empty
/// `bins` keeps everything).
inline std::map<int, std::vector<ConflictGraph>> partition_by_chromatic(const std::vector<ConflictGraph>& graphs,
                                                                        const std::set<int>& bins = {},
                                                                        int cap = kExactColoringCap) {
  std::map<int, std::vector<ConflictGraph>> out;
  for (const auto& g : graphs) {
    if (g.size() > cap) throw Error("partition_by_chromatic: graph exceeds exact coloring cap");
    const int chi = chromatic_number(underlying_undirected(g), cap);
    if (bins.empty() || bins.count(chi)) out[chi].push_back(g);
  }
  return out;
}

/// Draws ER(k, p) graphs until `count` of them have chromatic number `chi`.
inline std::vector<ConflictGraph> gen_er_with_chromatic(int k, double p, int chi, int count, std::uint64_t seed,
                                                        long max_draws = 1000000) {
  std::vector<ConflictGraph> out;
  for (long d = 0; static_cast<int>(out.size()) < count; ++d) {
    if (d >= max_draws) throw Error("gen_er_with_chromatic: draw limit reached");
    auto g = gen_er(k, p, seed + static_cast<std::uint64_t>(d));
    if (chromatic_number(underlying_undirected(g)) == chi) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace tim
