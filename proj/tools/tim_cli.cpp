// tim: dataset generation, bounds, the method ladder, agent training and
// evaluation, scheme verification and DOT export.
//
// Exit codes: 0 success, 1 invalid scheme, 2 usage or input error, 3 internal error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "tim/io.hpp"

namespace fs = std::filesystem;
using namespace tim;

namespace {

constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

std::uint64_t default_seed() {
  if (const char* s = std::getenv("TIM_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw Error("TIM_SEED is not an unsigned integer");
    }
  }
  return 0;
}

void echo_config(std::ostream& out, const std::string& cmd, json cfg) {
  cfg["command"] = cmd;
  out << json{{"config", cfg}}.dump() << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Dataset directories: manifest.json lists the instance files.

std::vector<std::string> list_instances(const std::string& path) {
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) throw Error("no such instance file or directory: " + path);
  std::vector<std::string> out;
  const fs::path manifest = fs::path(path) / "manifest.json";
  if (fs::exists(manifest)) {
    const json m = read_json_file(manifest.string());
    for (const auto& f : m.at("instances")) out.push_back((fs::path(path) / f.get<std::string>()).string());
    return out;
  }
  for (const auto& e : fs::directory_iterator(path))
    if (e.path().extension() == ".json") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> list_all(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    auto more = list_instances(in);
    out.insert(out.end(), more.begin(), more.end());
  }
  return out;
}

std::vector<ConflictGraph> load_graphs(const std::string& path) {
  std::vector<ConflictGraph> gs;
  for (const auto& f : list_instances(path)) gs.push_back(load_instance(f).graph);
  return gs;
}

// Runs f(i) for i in [0, count) on `jobs` threads.
template <class F>
void parallel_for(int count, int jobs, F&& f) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) f(i);
    });
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  std::string kind;
  int k = 6;
  double p = 0.4;
  double q = 1.0;
  double density = 0.4;
  int count = 1;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_gen(const GenOptions& o) {
  if (o.count < 0) throw Error("count must be >= 0");
  if (o.kind == "er") {
    gen_er(0, o.p, 0, o.q);  // validates p and q before touching the disk
  } else if (!(o.density > 0.0 && o.density < 1.0)) {
    throw Error("target density must lie in (0, 1)");
  }
  fs::create_directories(o.out);
  json params = o.kind == "er" ? json{{"k", o.k}, {"p", o.p}, {"q", o.q}} : json{{"k", o.k}, {"density", o.density}};
  json files = json::array();
  for (int i = 0; i < o.count; ++i) {
    const std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
    std::ostringstream name;
    name << "g" << std::setw(5) << std::setfill('0') << i << ".json";
    json inst;
    if (o.kind == "er") {
      inst = graph_to_json(gen_er(o.k, o.p, seed, o.q));
    } else {
      auto [lay, topo] = gen_wireless(o.k, o.density, seed);
      inst = topology_to_json(topo);
      inst["layout"] = layout_to_json(lay);
    }
    inst["seed"] = seed;
    write_json_file((fs::path(o.out) / name.str()).string(), inst);
    files.push_back(name.str());
  }
  const json manifest{{"generator", o.kind}, {"params", params}, {"seed", o.seed}, {"count", o.count}, {"instances", files}};
  write_json_file((fs::path(o.out) / "manifest.json").string(), manifest);
  json cfg = params;
  cfg.update({{"generator", o.kind}, {"seed", o.seed}, {"count", o.count}, {"out", o.out}});
  echo_config(std::cout, "gen", cfg);
  std::cout << json{{"written", o.count}, {"out", o.out}}.dump() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bound

int cmd_bound(const std::vector<std::string>& inputs) {
  echo_config(std::cout, "bound", {{"inputs", inputs}});
  for (const auto& f : list_all(inputs)) {
    json rec{{"instance", f}};
    try {
      rec.update(bound_to_json(mais(load_instance(f).graph)));
    } catch (const Error& e) {
      rec["error"] = e.what();
    }
    std::cout << rec.dump() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::vector<std::string> inputs;
  int n = 0;  // 0: take from each instance
  LadderConfig ladder;
  int jobs = 1;
  bool schemes = false;
  std::string out;
};

std::string column_of(Method m) {
  switch (m) {
    case Method::TDMA: return "TDMA";
    case Method::OSIA: return "OSIA";
    case Method::OVIA: return "OVIA";
    case Method::SSIA:
    case Method::SVIA: return "SSIA";
    default: return "SIMO";
  }
}

int cmd_solve(const SolveOptions& o) {
  const auto files = list_all(o.inputs);
  const LadderConfig& c = o.ladder;
  const json cfg{{"inputs", o.inputs},
                 {"n", o.n},
                 {"osia", c.use_osia},
                 {"ovia", c.use_ovia},
                 {"ssia", c.use_ssia},
                 {"simo", c.use_simo},
                 {"max_b", c.max_b},
                 {"max_b_subspace", c.max_b_subspace},
                 {"simo_max_b", c.simo_max_b},
                 {"budget", c.subspace_budget},
                 {"trials", c.trials},
                 {"seed", c.seed},
                 {"jobs", o.jobs}};
  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw Error("cannot write " + o.out);
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  echo_config(out, "solve", cfg);

  std::vector<json> records(files.size());
  std::vector<std::string> columns(files.size());
  std::vector<char> reached(files.size(), 0);
  parallel_for(static_cast<int>(files.size()), o.jobs, [&](int i) {
    json rec{{"instance", files[i]}};
    try {
      const auto inst = load_instance(files[i]);
      const int n = o.n > 0 ? o.n : inst.n;
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = best_scheme(inst.graph, n, o.ladder);
      bool budget = false;
      for (const auto& a : r.attempts) budget = budget || a.budget_hit;
      rec.update({{"nodes", inst.graph.size()},
                  {"n", n},
                  {"dof", r.dof.str()},
                  {"method", method_name(r.method)},
                  {"b", r.scheme.b},
                  {"c", r.scheme.c},
                  {"mais", r.bound.mais_size},
                  {"bound", r.bound.bound.str()},
                  {"optimal", r.optimal()},
                  {"budget_hit", budget},
                  {"seconds", seconds_since(t0)}});
      if (o.schemes) rec["scheme"] = scheme_to_json(r.scheme);
      columns[i] = column_of(r.method);
      reached[i] = r.optimal();
    } catch (const Error& e) {
      rec["error"] = e.what();
    }
    records[i] = std::move(rec);
  });

  std::map<std::string, int> counts;
  int ok = 0, opt = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    out << records[i].dump() << "\n";
    if (columns[i].empty()) continue;
    ++ok;
    ++counts[columns[i]];
    opt += reached[i];
  }
  std::vector<std::string> cols{"TDMA", "OSIA", "OVIA", "SSIA"};
  if (counts.count("SIMO")) cols.push_back("SIMO");
  std::ostream& table = o.out.empty() ? std::cerr : std::cout;
  table << std::left << std::setw(10) << "instances";
  for (const auto& col : cols) table << std::setw(8) << col;
  table << "reach-bound\n" << std::setw(10) << ok;
  auto pct = [&](int x) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << (ok ? 100.0 * x / ok : 0.0) << "%";
    return s.str();
  };
  for (const auto& col : cols) table << std::setw(8) << pct(counts[col]);
  table << pct(opt) << "\n";
  if (ok < static_cast<int>(files.size())) table << files.size() - ok << " instance(s) failed to load\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train / eval

struct TrainOptions {
  std::string data;
  int palette = 0;
  TrainConfig cfg;
  std::string out;
  std::string curve;
  std::string resume;
};

int cmd_train(TrainOptions o) {
  const auto graphs = load_graphs(o.data);
  if (graphs.empty()) throw Error("training set is empty");
  if (o.palette <= 0) {
    o.palette = 0;
    for (const auto& g : graphs) o.palette = std::max(o.palette, chromatic_number(underlying_undirected(g)));
  }
  for (const auto& g : graphs)
    if (chromatic_number(underlying_undirected(g)) > o.palette)
      throw Error("training graph needs more than S = " + std::to_string(o.palette) + " colors");
  const json cfg{{"data", o.data},          {"S", o.palette},
                 {"iterations", o.cfg.iterations}, {"episodes", o.cfg.episodes_per_iter},
                 {"hidden", o.cfg.hidden},  {"L", o.cfg.limit},
                 {"beta", o.cfg.beta},      {"lr", o.cfg.ppo.lr},
                 {"seed", o.cfg.seed},      {"out", o.out},
                 {"resume", o.resume}};
  echo_config(std::cout, "train", cfg);
  std::optional<PolicyParams> start;
  if (!o.resume.empty()) {
    start = checkpoint_from_json(read_json_file(o.resume));
    if (start->palette != o.palette) throw Error("checkpoint palette differs from S");
    o.cfg.hidden = start->hidden;
  }
  std::ofstream curve;
  if (!o.curve.empty()) {
    curve.open(o.curve);
    curve << "iteration,mean_return,mean_length,completed\n";
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto res = train(graphs, o.palette, o.cfg, start, [&](const TrainLogRow& r) {
    if (curve) curve << r.iteration << "," << r.mean_return << "," << r.mean_length << "," << r.completed << "\n";
    if ((r.iteration + 1) % 10 == 0)
      std::cerr << "iter " << r.iteration + 1 << " return " << r.mean_return << " completed " << r.completed << "\n";
  });
  write_json_file(o.out, checkpoint_to_json(res.params, cfg), -1);
  std::cout << json{{"checkpoint", o.out}, {"iterations", res.log.size()}, {"seconds", seconds_since(t0)}}.dump() << "\n";
  return 0;
}

struct EvalOptions {
  std::string data;
  std::string checkpoint;
  int rollouts = 20;
  int limit = 32;
  int tabu_iters = 1000;
  std::uint64_t seed = 0;
};

int cmd_eval(const EvalOptions& o) {
  const auto graphs = load_graphs(o.data);
  echo_config(std::cout, "eval", {{"data", o.data}, {"checkpoint", o.checkpoint}, {"rollouts", o.rollouts},
                                  {"L", o.limit}, {"tabu_iters", o.tabu_iters}, {"seed", o.seed}});
  std::optional<PolicyParams> p;
  if (!o.checkpoint.empty()) p = checkpoint_from_json(read_json_file(o.checkpoint));
  struct Tally {
    int hits = 0;
    double seconds = 0.0;
  };
  std::map<std::string, Tally> tally;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto& g = graphs[i];
    const auto u = underlying_undirected(g);
    const int chi = chromatic_number(u);
    auto t0 = std::chrono::steady_clock::now();
    tally["SLI"].hits += sli_greedy(u, o.seed + i).palette_size == chi;
    tally["SLI"].seconds += seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    tally["TabuCol"].hits += tabucol(u, chi, o.tabu_iters, o.seed + i).has_value();
    tally["TabuCol"].seconds += seconds_since(t0);
    if (p) {
      if (chi > p->palette) throw Error("instance needs more colors than the checkpoint palette");
      EnvConfig ec;
      ec.limit = o.limit;
      const LcgEnv env(g, p->palette, ec);
      t0 = std::chrono::steady_clock::now();
      const auto r = rollout_best_of(env, *p, o.rollouts, o.seed + i);
      tally["LCG"].hits += r.best && palette_size(r.best->node_state) <= chi;
      tally["LCG"].seconds += seconds_since(t0);
    }
  }
  const double count = static_cast<double>(graphs.size());
  for (const auto& [name, t] : tally) {
    std::cout << json{{"method", name},
                      {"instances", graphs.size()},
                      {"optimal_ratio", count ? t.hits / count : 0.0},
                      {"seconds_per_instance", count ? t.seconds / count : 0.0}}
                     .dump()
              << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify / export

int cmd_verify(const std::string& instance, const std::string& scheme_path, int trials, std::uint64_t seed) {
  echo_config(std::cout, "verify", {{"instance", instance}, {"scheme", scheme_path}, {"trials", trials}, {"seed", seed}});
  const auto g = load_instance(instance).graph;
  const auto s = scheme_from_json(read_json_file(scheme_path), g.size());
  const auto rep = verify(g, s, trials, seed);
  std::cout << report_to_json(rep).dump() << "\n";
  if (!rep.valid) {
    std::cerr << "invalid scheme; failing nodes:";
    for (Node v : rep.failing_nodes()) std::cerr << " " << v + 1;
    std::cerr << "\n";
    return kExitInvalid;
  }
  return 0;
}

int cmd_export(const std::string& instance, const std::string& scheme_path, const std::string& coloring_path,
               const std::string& out) {
  const auto g = load_instance(instance).graph;
  std::optional<CodingScheme> scheme;
  if (!scheme_path.empty()) scheme = scheme_from_json(read_json_file(scheme_path), g.size());
  std::optional<std::vector<int>> colors;
  if (!coloring_path.empty()) {
    const auto j = read_json_file(coloring_path);
    colors.emplace(g.size(), 0);
    for (const auto& [k, v] : j.at("colors").items()) {
      const int node = std::stoi(k) - 1;
      if (node < 0 || node >= g.size()) throw Error("coloring names unknown node " + k);
      (*colors)[node] = v.get<int>();
    }
  }
  const std::string dot = to_dot(g, scheme ? &*scheme : nullptr, colors ? &*colors : nullptr);
  if (out.empty()) {
    std::cout << dot;
  } else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << dot;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological interference management toolkit"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  try {
    seed = default_seed();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  GenOptions gen;
  gen.seed = seed;
  auto* gen_cmd = app.add_subcommand("gen", "generate a dataset directory");
  gen_cmd->add_option("kind", gen.kind, "er or wireless")->required()->check(CLI::IsMember({"er", "wireless"}));
  gen_cmd->add_option("--k", gen.k, "nodes (ER) or pairs (wireless)")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--p", gen.p, "ER edge probability");
  gen_cmd->add_option("--q", gen.q, "probability of keeping each node as a demanded message");
  gen_cmd->add_option("--density", gen.density, "wireless topological density");
  gen_cmd->add_option("--count", gen.count, "number of instances");
  gen_cmd->add_option("--seed", gen.seed, "first seed; instance i uses seed + i");
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  std::vector<std::string> bound_inputs;
  auto* bound_cmd = app.add_subcommand("bound", "MAIS outer bound per instance");
  bound_cmd->add_option("inputs", bound_inputs, "instance files or dataset directories")->required();

  SolveOptions solve;
  solve.ladder.seed = seed;
  std::uint64_t budget = solve.ladder.subspace_budget;
  bool no_osia = false, no_ovia = false, no_ssia = false, no_simo = false;
  auto* solve_cmd = app.add_subcommand("solve", "run the method ladder");
  solve_cmd->add_option("inputs", solve.inputs, "instance files or dataset directories")->required();
  solve_cmd->add_option("--n", solve.n, "receive antennas (default: from instance)");
  solve_cmd->add_option("--max-b", solve.ladder.max_b, "largest OVIA stream count");
  solve_cmd->add_option("--max-b-subspace", solve.ladder.max_b_subspace, "largest subspace stream count");
  solve_cmd->add_option("--simo-max-b", solve.ladder.simo_max_b, "largest SIMO stream count");
  solve_cmd->add_option("--budget", budget, "node-expansion budget per search");
  solve_cmd->add_option("--trials", solve.ladder.trials, "random channel draws for lifted ranks");
  solve_cmd->add_option("--seed", solve.ladder.seed, "seed for lifted-rank channel draws");
  solve_cmd->add_flag("--no-osia", no_osia, "skip local coloring");
  solve_cmd->add_flag("--no-ovia", no_ovia, "skip fractional local coloring");
  solve_cmd->add_flag("--no-ssia", no_ssia, "skip subspace search");
  solve_cmd->add_flag("--no-simo", no_simo, "skip SIMO search when n > 1");
  solve_cmd->add_flag("--schemes", solve.schemes, "include the scheme in each record");
  solve_cmd->add_option("--jobs", solve.jobs, "worker threads")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--out", solve.out, "JSON-lines output file (default stdout)");

  TrainOptions tr;
  tr.cfg.seed = seed;
  auto* train_cmd = app.add_subcommand("train", "train the coloring agent");
  train_cmd->add_option("data", tr.data, "dataset directory")->required();
  train_cmd->add_option("--S", tr.palette, "palette size (default: max chromatic number)");
  train_cmd->add_option("--iterations", tr.cfg.iterations, "PPO iterations")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--episodes", tr.cfg.episodes_per_iter, "episodes per iteration")->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden", tr.cfg.hidden, "hidden width")->check(CLI::PositiveNumber);
  train_cmd->add_option("--L", tr.cfg.limit, "iteration limit")->check(CLI::PositiveNumber);
  train_cmd->add_option("--beta", tr.cfg.beta, "terminal reward weight");
  train_cmd->add_option("--lr", tr.cfg.ppo.lr, "Adam learning rate");
  train_cmd->add_option("--seed", tr.cfg.seed, "graph order and sampling seed");
  train_cmd->add_option("--resume", tr.resume, "checkpoint to continue from");
  train_cmd->add_option("--curve", tr.curve, "CSV training curve");
  train_cmd->add_option("--out", tr.out, "checkpoint file")->required();

  EvalOptions ev;
  ev.seed = seed;
  auto* eval_cmd = app.add_subcommand("eval", "optimal-ratio table for LCG, SLI and TabuCol");
  eval_cmd->add_option("data", ev.data, "dataset directory")->required();
  eval_cmd->add_option("--checkpoint", ev.checkpoint, "trained agent (omit to skip LCG)");
  eval_cmd->add_option("--rollouts", ev.rollouts, "best-of rollouts per graph")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--L", ev.limit, "iteration limit")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--tabu-iters", ev.tabu_iters, "TabuCol iteration cap")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", ev.seed, "rollout and baseline seed");

  std::string instance, scheme_path, coloring_path, out;
  int trials = kDefaultTrials;
  auto* verify_cmd = app.add_subcommand("verify", "check a scheme against an instance");
  verify_cmd->add_option("instance", instance, "instance file")->required();
  verify_cmd->add_option("scheme", scheme_path, "scheme file")->required();
  verify_cmd->add_option("--trials", trials, "random channel draws for lifted ranks")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", seed, "seed for lifted-rank channel draws");

  auto* export_cmd = app.add_subcommand("export", "DOT rendering of an instance");
  export_cmd->add_option("instance", instance, "instance file")->required();
  export_cmd->add_option("--scheme", scheme_path, "scheme whose vectors label the nodes");
  export_cmd->add_option("--coloring", coloring_path, "coloring whose colors label the nodes");
  export_cmd->add_option("--out", out, "DOT file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*bound_cmd) return cmd_bound(bound_inputs);
    if (*solve_cmd) {
      solve.ladder.use_osia = !no_osia;
      solve.ladder.use_ovia = !no_ovia;
      solve.ladder.use_ssia = !no_ssia;
      solve.ladder.use_simo = !no_simo;
      solve.ladder.coloring_budget = solve.ladder.subspace_budget = solve.ladder.simo_budget = budget;
      return cmd_solve(solve);
    }
    if (*train_cmd) return cmd_train(tr);
    if (*eval_cmd) return cmd_eval(ev);
    if (*verify_cmd) return cmd_verify(instance, scheme_path, trials, seed);
    if (*export_cmd) return cmd_export(instance, scheme_path, coloring_path, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
