#include <gtest/gtest.h>

#include <numeric>

#include "fd_check.hpp"
#include "test_util.hpp"
#include "tim/datasets.hpp"
#include "tim/lcg_agent.hpp"

using namespace tim;
using tim::test::graph1;

namespace {

Features random_features(int nodes, int palette, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  auto g = tim::test::random_graph(nodes, p, rng);
  EnvConfig ec;
  const LcgEnv env(g, palette, ec);
  EnvState s = env.reset();
  s.t = 3;
  for (int v = 0; v < nodes; ++v)
    if (u(rng) < 0.3) s.node_state[v] = 1 + static_cast<int>(rng() % palette);
  return featurize(env, s);
}

Features permuted(const Features& f, const std::vector<int>& perm) {
  // row a of the result is row perm[a] of the input
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) p(a, perm[a]) = 1.0;
  Features out;
  out.x = p * f.x;
  out.adj = p * f.adj * p.transpose();
  return out;
}

}  // namespace

TEST(Gnn, ShapesChain) {
  auto p = PolicyParams::init(5, 16, 1);
  EXPECT_EQ(p.policy.layers(), 4);
  EXPECT_EQ(p.policy.w1.front().rows(), 7);
  EXPECT_EQ(p.policy.w1.back().cols(), 6);
  EXPECT_EQ(p.value.w1.back().cols(), 1);
  for (int l = 0; l + 1 < 4; ++l) EXPECT_EQ(p.policy.w1[l].cols(), p.policy.w1[l + 1].rows());
  Features bad;
  bad.x = Eigen::MatrixXd::Zero(2, 3);
  bad.adj = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_THROW(policy_forward(p, bad), Error);
}

TEST(Gnn, InitBounds) {
  auto p = PolicyParams::init(3, 8, 2);
  EXPECT_LE(p.policy.w1[0].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(5.0));
  EXPECT_LE(p.policy.w2[1].cwiseAbs().maxCoeff(), 1.0 / std::sqrt(8.0));
}

TEST(Policy, RowsAreDistributions) {
  std::mt19937_64 rng(31);
  auto p = PolicyParams::init(4, 16, 3);
  for (int t = 0; t < 20; ++t) {
    auto f = random_features(8, 4, 0.3, rng);
    auto probs = policy_forward(p, f);
    ASSERT_EQ(probs.cols(), 5);
    for (Eigen::Index r = 0; r < probs.rows(); ++r) {
      EXPECT_NEAR(probs.row(r).sum(), 1.0, 1e-9);
      EXPECT_GE(probs.row(r).minCoeff(), 0.0);
    }
    EXPECT_TRUE(std::isfinite(value_forward(p, f)));
  }
}

TEST(Policy, ZeroWeightsGiveUniform) {
  std::mt19937_64 rng(32);
  auto p = PolicyParams::init(3, 8, 4);
  p.policy = Gnn::zeros_like(p.policy);
  auto probs = policy_forward(p, random_features(5, 3, 0.4, rng));
  EXPECT_NEAR((probs.array() - 0.25).abs().maxCoeff(), 0.0, 1e-15);
}

TEST(Policy, PermutationEquivariance) {
  std::mt19937_64 rng(33);
  auto p = PolicyParams::init(3, 16, 5);
  for (int t = 0; t < 20; ++t) {
    auto f = random_features(7, 3, 0.4, rng);
    std::vector<int> perm(f.x.rows());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto g = permuted(f, perm);
    auto a = policy_forward(p, f);
    auto b = policy_forward(p, g);
    for (std::size_t r = 0; r < perm.size(); ++r) EXPECT_LE((b.row(r) - a.row(perm[r])).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(value_forward(p, f), value_forward(p, g), 1e-9);
  }
}

TEST(Policy, IsolatedNodeSeesOnlyItself) {
  auto p = PolicyParams::init(2, 8, 6);
  Features one;
  one.x = Eigen::MatrixXd(1, 4);
  one.x << 0.25, 1, 0, 2;
  one.adj = Eigen::MatrixXd::Identity(1, 1);
  Features two;
  two.x = Eigen::MatrixXd(2, 4);
  two.x << 0.25, 1, 0, 2, 0.5, 3, 1, 0;
  two.adj = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_LE((policy_forward(p, one).row(0) - policy_forward(p, two).row(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Value, EmptyIsZeroAndSumPoolingIsAdditive) {
  auto p = PolicyParams::init(2, 8, 7);
  Features empty;
  empty.x = Eigen::MatrixXd(0, 4);
  empty.adj = Eigen::MatrixXd(0, 0);
  EXPECT_EQ(value_forward(p, empty), 0.0);
  Features one;
  one.x = Eigen::MatrixXd(1, 4);
  one.x << 0.1, 2, 1, 0;
  one.adj = Eigen::MatrixXd::Identity(1, 1);
  Features two;
  two.x = Eigen::MatrixXd(2, 4);
  two.x << one.x, one.x;
  two.adj = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_NEAR(value_forward(p, two), 2.0 * value_forward(p, one), 1e-12);
}

TEST(Ppo, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 10; ++t) {
    auto fc = tim::test::random_fd_case(rng);
    EXPECT_LT(tim::test::fd_relative_error(fc), 1e-4) << "case " << t;
  }
}

TEST(Ppo, ZeroAdvantageMovesOnlyValue) {
  const LcgEnv env(graph1(3, {{1, 2}, {2, 3}}), 2, EnvConfig{});
  auto p = PolicyParams::init(2, 8, 8);
  Transition tr;
  tr.features = featurize(env, env.reset());
  tr.action = {1, 0, 2};
  const auto probs = policy_forward(p, tr.features);
  for (int a = 0; a < 3; ++a) tr.log_prob += std::log(probs(a, tr.action[a]));
  tr.advantage = 0.0;
  tr.ret = 1.0;
  PpoConfig cfg;
  cfg.entropy_coef = 0.0;
  Gradients g{Gnn::zeros_like(p.policy), Gnn::zeros_like(p.value)};
  const auto loss = ppo_loss(p, {&tr}, cfg, &g);
  EXPECT_DOUBLE_EQ(loss.policy, 0.0);
  double policy_sq = 0.0, value_sq = 0.0;
  g.policy.for_each([&](Eigen::MatrixXd& m) { policy_sq += m.squaredNorm(); });
  g.value.for_each([&](Eigen::MatrixXd& m) { value_sq += m.squaredNorm(); });
  EXPECT_EQ(policy_sq, 0.0);
  EXPECT_GT(value_sq, 0.0);
}

TEST(Ppo, ClipBoundaryIsContinuous) {
  const LcgEnv env(graph1(2, {{1, 2}}), 2, EnvConfig{});
  auto p = PolicyParams::init(2, 8, 9);
  Transition tr;
  tr.features = featurize(env, env.reset());
  tr.action = {1, 2};
  const auto probs = policy_forward(p, tr.features);
  const double logp = std::log(probs(0, 1)) + std::log(probs(1, 2));
  tr.advantage = 1.0;
  PpoConfig cfg;
  cfg.entropy_coef = 0.0;
  cfg.value_coef = 0.0;
  // ratio = 1.2 exactly
  tr.log_prob = logp - std::log(1.2);
  EXPECT_NEAR(ppo_loss(p, {&tr}, cfg).policy, -1.2, 1e-12);
  tr.log_prob = logp - std::log(1.5);
  EXPECT_NEAR(ppo_loss(p, {&tr}, cfg).policy, -1.2, 1e-12);
  tr.advantage = -1.0;
  EXPECT_NEAR(ppo_loss(p, {&tr}, cfg).policy, 1.5, 1e-12);
}

TEST(Ppo, AdvantagesWithUnitDiscount) {
  Trajectory tr;
  tr.steps.resize(3);
  tr.steps[0].reward = 0.5;
  tr.steps[1].reward = 0.25;
  tr.steps[2].reward = 1.0;
  compute_advantages(tr, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(tr.steps[0].ret, 1.75);
  EXPECT_DOUBLE_EQ(tr.steps[2].ret, 1.0);
}

TEST(Ppo, UpdateChangesWeightsAndRejectsEmpty) {
  std::mt19937_64 rng(35);
  EnvConfig ec;
  ec.limit = 8;
  const LcgEnv env(graph1(4, {{1, 2}, {2, 3}, {3, 4}}), 2, ec);
  auto p = PolicyParams::init(2, 8, 10);
  const auto before = p.policy.w1[0];
  std::vector<Trajectory> batch;
  for (int e = 0; e < 4; ++e) batch.push_back(run_episode(env, p, rng));
  auto adam = AdamState::like(p);
  ppo_update(p, batch, PpoConfig{}, adam);
  EXPECT_GT((p.policy.w1[0] - before).cwiseAbs().maxCoeff(), 0.0);
  std::vector<Trajectory> none;
  EXPECT_THROW(ppo_update(p, none, PpoConfig{}, adam), Error);
}

TEST(Ppo, NonFiniteLossAborts) {
  std::mt19937_64 rng(36);
  const LcgEnv env(graph1(2, {{1, 2}}), 2, EnvConfig{});
  auto p = PolicyParams::init(2, 8, 11);
  std::vector<Trajectory> batch{run_episode(env, p, rng)};
  batch[0].steps[0].reward = std::numeric_limits<double>::quiet_NaN();
  auto adam = AdamState::like(p);
  EXPECT_THROW(ppo_update(p, batch, PpoConfig{}, adam), Error);
}

TEST(Train, ZeroIterationsReturnsInit) {
  TrainConfig cfg;
  cfg.iterations = 0;
  cfg.hidden = 8;
  auto res = train({graph1(2, {{1, 2}})}, 2, cfg);
  auto init = PolicyParams::init(2, 8, cfg.seed);
  EXPECT_EQ(res.params.policy.w1[0], init.policy.w1[0]);
  EXPECT_TRUE(res.log.empty());
  EXPECT_THROW(train({}, 2, cfg), Error);
}

TEST(Train, ShortRunLogsAndColorsSoundly) {
  TrainConfig cfg;
  cfg.iterations = 5;
  cfg.hidden = 16;
  cfg.episodes_per_iter = 4;
  const auto data = gen_er_with_chromatic(6, 0.4, 3, 5, 0);
  auto res = train(data, 3, cfg);
  EXPECT_EQ(res.log.size(), 5u);
  const LcgEnv env(data[0], 3, env_config_for(cfg));
  auto best = rollout_best_of(env, res.params, 20, 1);
  if (best.best) {
    EXPECT_TRUE(is_proper(env.undirected(), best.best->node_state));
  }
  EXPECT_THROW(train(data, 4, cfg, res.params), Error);
}

TEST(Rollout, HandSetPolicyTwoColorsPath) {
  // Own deferred-neighbor count minus its normalized aggregate is negative
  // at the ends of a 3-path and positive in the middle.
  auto p = PolicyParams::init(2, 4, 12);
  p.policy = Gnn::zeros_like(p.policy);
  p.policy.w1[0](1, 0) = 1.0;
  p.policy.w2[0](1, 1) = 1.0;
  for (int l = 1; l < 3; ++l) {
    p.policy.w1[l](0, 0) = 1.0;
    p.policy.w1[l](1, 1) = 1.0;
  }
  p.policy.w1[3](0, 2) = 100.0;
  p.policy.w1[3](1, 2) = -100.0;
  p.policy.w1[3](0, 1) = -100.0;
  p.policy.w1[3](1, 1) = 100.0;
  const LcgEnv env(graph1(3, {{1, 2}, {3, 2}}), 2, EnvConfig{});
  std::mt19937_64 rng(0);
  auto tr = run_episode(env, p, rng, true);
  EXPECT_TRUE(tr.completed);
  EXPECT_EQ(tr.final_state.node_state, (std::vector<int>{1, 2, 1}));
  auto r = rollout_best_of(env, p, 1, 0);
  ASSERT_TRUE(r.best.has_value());
  EXPECT_EQ(r.best->t, 1);
  EXPECT_THROW(rollout_best_of(env, p, 0, 0), Error);
}

TEST(Rollout, BestOfKIsMonotone) {
  std::mt19937_64 rng(37);
  auto p = PolicyParams::init(3, 8, 13);
  int k1 = 0, k20 = 0;
  EnvConfig ec;
  ec.limit = 6;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const LcgEnv env(tim::test::random_graph(6, 0.3, rng), 3, ec);
    const auto a = rollout_best_of(env, p, 1, s);
    const auto b = rollout_best_of(env, p, 20, s);
    k1 += a.best.has_value();
    k20 += b.best.has_value();
    // rollout 0 is shared, so success at k = 1 implies success at k = 20
    if (a.best) {
      EXPECT_TRUE(b.best.has_value());
    }
  }
  EXPECT_GE(k20, k1);
}
