// Colors a random ER conflict graph three ways: smallest-last greedy with
// interchange, TabuCol at the chromatic number, and an untrained agent.
//
//   color_graph [k] [p] [seed]

#include <iostream>

#include "tim/datasets.hpp"
#include "tim/lcg_agent.hpp"

int main(int argc, char** argv) {
  const int k = argc > 1 ? std::stoi(argv[1]) : 15;
  const double p = argc > 2 ? std::stod(argv[2]) : 0.3;
  const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 1;

  const auto g = tim::gen_er(k, p, seed);
  const auto u = tim::underlying_undirected(g);
  const int chi = tim::chromatic_number(u);
  std::cout << "chromatic number " << chi << "\n";

  const auto sli = tim::sli_greedy(u, seed);
  std::cout << "SLI      " << sli.palette_size << " colors\n";

  const auto tabu = tim::tabucol(u, chi, 1000, seed);
  std::cout << "TabuCol  " << (tabu ? "colored with " + std::to_string(chi) : std::string("no coloring")) << "\n";

  const auto params = tim::PolicyParams::init(chi, 32, seed);
  const tim::LcgEnv env(g, chi, tim::EnvConfig{});
  const auto r = tim::rollout_best_of(env, params, 20, seed);
  std::cout << "agent    " << r.completed << "/20 rollouts completed";
  if (r.best) std::cout << ", best after " << r.best->t << " iterations";
  std::cout << "\n";
  return 0;
}
