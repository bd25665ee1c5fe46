#pragma once

// Policy and value networks for the learn-to-defer process, PPO training and
// best-of-k evaluation rollouts.
//
// Each network stacks four message-passing layers
//   H' = act(H W1 + A_hat H W2),  A_hat = D^-1/2 (B + I) D^-1/2
// over the subgraph induced on deferred nodes. The policy ends in a per-node
// softmax over {0 (defer), 1..S}; the value network sums its final per-node
// outputs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tim/graph.hpp"
#include "tim/lcg_env.hpp"

namespace tim {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Features {
  std::vector<Node> nodes;  // deferred nodes, ascending
  MatrixXd x;               // |nodes| x (1 + S + 1)
  MatrixXd adj;             // normalized, with self-loops
};

/// Per deferred node: [t / L] followed by the sum over all undirected
/// neighbors of one-hot(neighbor state) with S + 1 classes.
inline Features featurize(const LcgEnv& env, const EnvState& s) {
  Features f;
  f.nodes = s.deferred();
  const int classes = env.palette() + 1;
  const int nd = static_cast<int>(f.nodes.size());
  f.x = MatrixXd::Zero(nd, 1 + classes);
  std::vector<int> pos(env.size(), -1);
  for (int a = 0; a < nd; ++a) pos[f.nodes[a]] = a;
  const auto& u = env.undirected();
  for (int a = 0; a < nd; ++a) {
    const Node v = f.nodes[a];
    f.x(a, 0) = static_cast<double>(s.t) / static_cast<double>(env.config().limit);
    for (int w : u.neighbors(v)) f.x(a, 1 + s.node_state[w]) += 1.0;
  }
  MatrixXd b = MatrixXd::Identity(nd, nd);
  for (int a = 0; a < nd; ++a)
    for (int w : u.neighbors(f.nodes[a]))
      if (pos[w] >= 0) b(a, pos[w]) = 1.0;
  VectorXd dinv(nd);
  for (int a = 0; a < nd; ++a) dinv(a) = 1.0 / std::sqrt(b.row(a).sum());
  f.adj = dinv.asDiagonal() * b * dinv.asDiagonal();
  return f;
}

// ---------------------------------------------------------------------------

struct Gnn {
  std::vector<MatrixXd> w1;
  std::vector<MatrixXd> w2;

  int layers() const { return static_cast<int>(w1.size()); }

  static Gnn init(const std::vector<int>& widths, std::mt19937_64& rng) {
    Gnn g;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(widths[l]));
      std::uniform_real_distribution<double> u(-bound, bound);
      MatrixXd a(widths[l], widths[l + 1]), b(widths[l], widths[l + 1]);
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = u(rng);
      for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
      g.w1.push_back(std::move(a));
      g.w2.push_back(std::move(b));
    }
    return g;
  }

  static Gnn zeros_like(const Gnn& o) {
    Gnn g;
    for (const auto& m : o.w1) g.w1.push_back(MatrixXd::Zero(m.rows(), m.cols()));
    for (const auto& m : o.w2) g.w2.push_back(MatrixXd::Zero(m.rows(), m.cols()));
    return g;
  }

  template <class F>
  void for_each(F&& f) {
    for (auto& m : w1) f(m);
    for (auto& m : w2) f(m);
  }
  template <class F>
  void for_each_pair(Gnn& other, F&& f) {
    for (std::size_t l = 0; l < w1.size(); ++l) {
      f(w1[l], other.w1[l]);
      f(w2[l], other.w2[l]);
    }
  }
};

struct GnnCache {
  std::vector<MatrixXd> h;   // h[0] = input, h[l + 1] = output of layer l
  std::vector<MatrixXd> ah;  // A_hat h[l]
  std::vector<MatrixXd> z;   // pre-activations
};

/// Forward pass; the last layer is linear, all others ReLU.
inline MatrixXd gnn_forward(const Gnn& net, const MatrixXd& x, const MatrixXd& adj, GnnCache* cache = nullptr) {
  MatrixXd h = x;
  if (cache) {
    cache->h.assign(1, x);
    cache->ah.clear();
    cache->z.clear();
  }
  for (int l = 0; l < net.layers(); ++l) {
    MatrixXd ah = adj * h;
    MatrixXd z = h * net.w1[l] + ah * net.w2[l];
    h = (l + 1 < net.layers()) ? MatrixXd(z.cwiseMax(0.0)) : z;
    if (cache) {
      cache->ah.push_back(std::move(ah));
      cache->z.push_back(std::move(z));
      cache->h.push_back(h);
    }
  }
  return h;
}

/// Accumulates dL/dW into `grad` given dL/d(final output).
inline void gnn_backward(const Gnn& net, const MatrixXd& adj, const GnnCache& cache, MatrixXd dout, Gnn& grad) {
  for (int l = net.layers() - 1; l >= 0; --l) {
    MatrixXd dz = std::move(dout);
    if (l + 1 < net.layers()) dz = dz.cwiseProduct((cache.z[l].array() > 0.0).cast<double>().matrix());
    grad.w1[l].noalias() += cache.h[l].transpose() * dz;
    grad.w2[l].noalias() += cache.ah[l].transpose() * dz;
    if (l > 0) dout = dz * net.w1[l].transpose() + adj.transpose() * (dz * net.w2[l].transpose());
  }
}

struct PolicyParams {
  Gnn policy;
  Gnn value;
  int palette = 1;  // S
  int hidden = 128;

  int feature_dim() const { return 1 + palette + 1; }
  int actions() const { return palette + 1; }

  static PolicyParams init(int palette, int hidden, std::uint64_t seed, int layers = 4) {
    std::mt19937_64 rng(seed);
    PolicyParams p;
    p.palette = palette;
    p.hidden = hidden;
    std::vector<int> pw{p.feature_dim()}, vw{p.feature_dim()};
    for (int l = 0; l + 1 < layers; ++l) {
      pw.push_back(hidden);
      vw.push_back(hidden);
    }
    pw.push_back(p.actions());
    vw.push_back(1);
    p.policy = Gnn::init(pw, rng);
    p.value = Gnn::init(vw, rng);
    return p;
  }

  void check_shapes(const Features& f) const {
    if (f.x.cols() != feature_dim()) throw Error("feature width does not match the network");
    if (f.adj.rows() != f.x.rows() || f.adj.cols() != f.x.rows()) throw Error("adjacency shape mismatch");
  }
};

inline MatrixXd row_softmax(const MatrixXd& logits) {
  MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    p.row(r) = (logits.row(r).array() - mx).exp().matrix();
    p.row(r) /= p.row(r).sum();
  }
  return p;
}

inline MatrixXd policy_forward(const PolicyParams& p, const Features& f) {
  p.check_shapes(f);
  if (f.x.rows() == 0) return MatrixXd(0, p.actions());
  return row_softmax(gnn_forward(p.policy, f.x, f.adj));
}

inline double value_forward(const PolicyParams& p, const Features& f) {
  p.check_shapes(f);
  if (f.x.rows() == 0) return 0.0;
  return gnn_forward(p.value, f.x, f.adj).sum();
}

// ---------------------------------------------------------------------------
// Trajectories.

struct Transition {
  Features features;
  std::vector<int> action;  // per deferred node, aligned with features.nodes
  double log_prob = 0.0;
  double value = 0.0;
  double reward = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

struct Trajectory {
  std::vector<Transition> steps;
  EnvState final_state;
  double episode_return = 0.0;
  bool completed = false;
};

struct PpoConfig {
  double lr = 1e-3;
  double clip = 0.2;
  double grad_clip = 0.2;
  double value_coef = 0.5;
  double entropy_coef = 0.01;
  double gamma = 1.0;
  double lambda = 0.95;
  int epochs = 4;
};

/// Generalized advantage estimation; terminal bootstrap value is 0.
inline void compute_advantages(Trajectory& tr, double gamma, double lambda) {
  double next_value = 0.0;
  double gae = 0.0;
  for (auto it = tr.steps.rbegin(); it != tr.steps.rend(); ++it) {
    const double delta = it->reward + gamma * next_value - it->value;
    gae = delta + gamma * lambda * gae;
    it->advantage = gae;
    it->ret = gae + it->value;
    next_value = it->value;
  }
}

/// Samples one episode; `greedy` takes the arg-max action at every node.
inline Trajectory run_episode(const LcgEnv& env, const PolicyParams& p, std::mt19937_64& rng, bool greedy = false,
                              bool keep_features = true) {
  Trajectory tr;
  EnvState s = env.reset();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (!env.terminal(s)) {
    Transition step;
    step.features = featurize(env, s);
    const MatrixXd probs = policy_forward(p, step.features);
    step.value = value_forward(p, step.features);
    std::vector<int> full(env.size(), kKeep);
    for (Eigen::Index a = 0; a < probs.rows(); ++a) {
      int choice = 0;
      if (greedy) {
        probs.row(a).maxCoeff(&choice);
      } else {
        double r = unit(rng), acc = 0.0;
        choice = static_cast<int>(probs.cols()) - 1;
        for (Eigen::Index c = 0; c < probs.cols(); ++c) {
          acc += probs(a, c);
          if (r < acc) {
            choice = static_cast<int>(c);
            break;
          }
        }
      }
      step.action.push_back(choice);
      step.log_prob += std::log(std::max(probs(a, choice), 1e-300));
      full[step.features.nodes[a]] = choice;
    }
    auto out = env.step(s, full);
    step.reward = out.reward;
    tr.episode_return += out.reward;
    s = std::move(out.next);
    if (!keep_features) step.features = Features{};
    tr.steps.push_back(std::move(step));
  }
  tr.final_state = s;
  tr.completed = s.fixed_count() == env.size();
  return tr;
}

// ---------------------------------------------------------------------------
// PPO.

struct LossParts {
  double total = 0.0;
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
};

struct Gradients {
  Gnn policy;
  Gnn value;
};

/// Clipped-surrogate PPO loss averaged over all transitions, with its exact
/// gradient when `grad` is given. Advantages are used as stored.
inline LossParts ppo_loss(const PolicyParams& p, const std::vector<const Transition*>& batch, const PpoConfig& cfg,
                          Gradients* grad = nullptr) {
  LossParts loss;
  if (batch.empty()) return loss;
  const double scale = 1.0 / static_cast<double>(batch.size());
  GnnCache pc, vc;
  for (const Transition* tr : batch) {
    const Features& f = tr->features;
    if (f.x.rows() == 0) continue;
    const MatrixXd logits = gnn_forward(p.policy, f.x, f.adj, grad ? &pc : nullptr);
    const MatrixXd probs = row_softmax(logits);
    double logp = 0.0, entropy = 0.0;
    for (Eigen::Index a = 0; a < probs.rows(); ++a) {
      logp += std::log(probs(a, tr->action[a]));
      for (Eigen::Index c = 0; c < probs.cols(); ++c)
        if (probs(a, c) > 0) entropy -= probs(a, c) * std::log(probs(a, c));
    }
    const double ratio = std::exp(logp - tr->log_prob);
    const double adv = tr->advantage;
    const double clipped = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double unclipped_term = ratio * adv;
    const double clipped_term = clipped * adv;
    const bool use_unclipped = unclipped_term <= clipped_term;
    const double surrogate = use_unclipped ? unclipped_term : clipped_term;
    const MatrixXd vout = gnn_forward(p.value, f.x, f.adj, grad ? &vc : nullptr);
    const double v = vout.sum();
    const double verr = v - tr->ret;

    loss.policy += -surrogate * scale;
    loss.value += verr * verr * scale;
    loss.entropy += entropy * scale;

    if (grad) {
      // d(-surrogate)/d(logp)
      double dlogp = 0.0;
      if (use_unclipped || (ratio >= 1.0 - cfg.clip && ratio <= 1.0 + cfg.clip)) dlogp = -ratio * adv;
      MatrixXd dlogits = MatrixXd::Zero(probs.rows(), probs.cols());
      for (Eigen::Index a = 0; a < probs.rows(); ++a) {
        double h = 0.0;
        for (Eigen::Index c = 0; c < probs.cols(); ++c)
          if (probs(a, c) > 0) h -= probs(a, c) * std::log(probs(a, c));
        for (Eigen::Index c = 0; c < probs.cols(); ++c) {
          const double pc_ = probs(a, c);
          const double onehot = (c == tr->action[a]) ? 1.0 : 0.0;
          double g = dlogp * (onehot - pc_);
          const double logpc = pc_ > 0 ? std::log(pc_) : 0.0;
          g += cfg.entropy_coef * pc_ * (logpc + h);  // d(-c_e H)/dz
          dlogits(a, c) = g * scale;
        }
      }
      gnn_backward(p.policy, f.adj, pc, std::move(dlogits), grad->policy);
      MatrixXd dv = MatrixXd::Constant(vout.rows(), 1, 2.0 * cfg.value_coef * verr * scale);
      gnn_backward(p.value, f.adj, vc, std::move(dv), grad->value);
    }
  }
  loss.total = loss.policy + cfg.value_coef * loss.value - cfg.entropy_coef * loss.entropy;
  return loss;
}

/// Adam state for both networks.
struct AdamState {
  Gradients m;
  Gradients v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState like(const PolicyParams& p) {
    AdamState s;
    s.m = {Gnn::zeros_like(p.policy), Gnn::zeros_like(p.value)};
    s.v = {Gnn::zeros_like(p.policy), Gnn::zeros_like(p.value)};
    return s;
  }
};

inline double grad_norm(Gradients& g) {
  double sq = 0.0;
  g.policy.for_each([&](MatrixXd& m) { sq += m.squaredNorm(); });
  g.value.for_each([&](MatrixXd& m) { sq += m.squaredNorm(); });
  return std::sqrt(sq);
}

inline void adam_apply(PolicyParams& p, Gradients& g, AdamState& st, double lr) {
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  auto update = [&](Gnn& w, Gnn& gr, Gnn& m, Gnn& v) {
    for (std::size_t l = 0; l < w.w1.size(); ++l)
      for (auto [wm, gm, mm, vm] : {std::tie(w.w1[l], gr.w1[l], m.w1[l], v.w1[l]),
                                    std::tie(w.w2[l], gr.w2[l], m.w2[l], v.w2[l])}) {
        mm = st.beta1 * mm + (1.0 - st.beta1) * gm;
        vm = st.beta2 * vm + (1.0 - st.beta2) * gm.cwiseProduct(gm);
        wm.array() -= lr * (mm.array() / c1) / ((vm.array() / c2).sqrt() + st.eps);
      }
  };
  update(p.policy, g.policy, st.m.policy, st.v.policy);
  update(p.value, g.value, st.m.value, st.v.value);
}

struct UpdateStats {
  LossParts first_loss;
  double grad_norm = 0.0;
};

/// PPO step on a batch: advantages normalized over the batch, `epochs` passes
/// of full-batch Adam with global gradient-norm clipping.
inline UpdateStats ppo_update(PolicyParams& p, std::vector<Trajectory>& batch, const PpoConfig& cfg, AdamState& adam) {
  if (batch.empty()) throw Error("ppo_update: empty batch");
  std::vector<const Transition*> steps;
  double mean = 0.0, sq = 0.0;
  for (auto& tr : batch) {
    compute_advantages(tr, cfg.gamma, cfg.lambda);
    for (auto& s : tr.steps) {
      steps.push_back(&s);
      mean += s.advantage;
    }
  }
  UpdateStats stats;
  if (steps.empty()) return stats;
  mean /= static_cast<double>(steps.size());
  for (auto* s : steps) sq += (s->advantage - mean) * (s->advantage - mean);
  const double sd = std::sqrt(sq / static_cast<double>(steps.size()));
  for (auto& tr : batch)
    for (auto& s : tr.steps) s.advantage = steps.size() > 1 ? (s.advantage - mean) / (sd + 1e-8) : s.advantage - mean;
  for (int e = 0; e < cfg.epochs; ++e) {
    Gradients g{Gnn::zeros_like(p.policy), Gnn::zeros_like(p.value)};
    const LossParts loss = ppo_loss(p, steps, cfg, &g);
    if (!std::isfinite(loss.total)) {
      std::ostringstream msg;
      msg << "ppo_update: non-finite loss (policy " << loss.policy << ", value " << loss.value << ", entropy "
          << loss.entropy << ")";
      throw Error(msg.str());
    }
    if (e == 0) stats.first_loss = loss;
    const double norm = grad_norm(g);
    if (e == 0) stats.grad_norm = norm;
    if (norm > cfg.grad_clip) {
      const double s = cfg.grad_clip / norm;
      g.policy.for_each([&](MatrixXd& m) { m *= s; });
      g.value.for_each([&](MatrixXd& m) { m *= s; });
    }
    adam_apply(p, g, adam, cfg.lr);
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Training and evaluation.

struct TrainConfig {
  int iterations = 300;
  int episodes_per_iter = 8;
  int hidden = 128;
  int limit = 32;
  double beta = 1.0;
  std::uint64_t seed = 0;
  EnvKind kind = EnvKind::Coloring;
  int b = 1;
  int c = 1;
  int n = 1;
  PpoConfig ppo;
};

struct TrainLogRow {
  int iteration = 0;
  double mean_return = 0.0;
  double mean_length = 0.0;
  double completed = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<TrainLogRow> log;
};

inline EnvConfig env_config_for(const TrainConfig& cfg) {
  EnvConfig e;
  e.kind = cfg.kind;
  e.b = cfg.b;
  e.c = cfg.c;
  e.n = cfg.n;
  e.limit = cfg.limit;
  e.beta = cfg.beta;
  e.seed = cfg.seed;
  return e;
}

inline TrainResult train(const std::vector<ConflictGraph>& dataset, int palette, const TrainConfig& cfg,
                         std::optional<PolicyParams> start = std::nullopt,
                         const std::function<void(const TrainLogRow&)>& on_iter = {}) {
  if (dataset.empty()) throw Error("train: empty dataset");
  TrainResult res;
  res.params = start ? std::move(*start) : PolicyParams::init(palette, cfg.hidden, cfg.seed);
  if (res.params.palette != palette) throw Error("train: checkpoint palette differs from S");
  AdamState adam = AdamState::like(res.params);
  std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);
  std::uniform_int_distribution<std::size_t> pick(0, dataset.size() - 1);
  const EnvConfig ec = env_config_for(cfg);
  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<Trajectory> batch;
    TrainLogRow row;
    row.iteration = it;
    for (int e = 0; e < cfg.episodes_per_iter; ++e) {
      const LcgEnv env(dataset[pick(rng)], palette, ec);
      batch.push_back(run_episode(env, res.params, rng));
      row.mean_return += batch.back().episode_return;
      row.mean_length += static_cast<double>(batch.back().steps.size());
      row.completed += batch.back().completed ? 1.0 : 0.0;
    }
    row.mean_return /= cfg.episodes_per_iter;
    row.mean_length /= cfg.episodes_per_iter;
    row.completed /= cfg.episodes_per_iter;
    ppo_update(res.params, batch, cfg.ppo, adam);
    res.log.push_back(row);
    if (on_iter) on_iter(row);
  }
  return res;
}

struct RolloutResult {
  std::optional<EnvState> best;  // set iff some episode completed
  int best_index = -1;
  int completed = 0;
};

/// k sampled episodes run concurrently on independent states; keeps the
/// completed one with most fixed nodes, then fewest iterations, then lowest index.
inline RolloutResult rollout_best_of(const LcgEnv& env, const PolicyParams& p, int k, std::uint64_t seed) {
  if (k < 1) throw Error("rollout count must be >= 1");
  std::vector<std::future<Trajectory>> jobs;
  for (int i = 0; i < k; ++i)
    jobs.push_back(std::async(std::launch::async, [&env, &p, seed, i] {
      std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(i));
      return run_episode(env, p, rng, false, false);
    }));
  RolloutResult res;
  for (int i = 0; i < k; ++i) {
    Trajectory tr = jobs[i].get();
    if (!tr.completed) continue;
    ++res.completed;
    const bool better = !res.best || tr.final_state.fixed_count() > res.best->fixed_count() ||
                        (tr.final_state.fixed_count() == res.best->fixed_count() && tr.final_state.t < res.best->t);
    if (better) {
      res.best = tr.final_state;
      res.best_index = i;
    }
  }
  return res;
}

}  // namespace tim
