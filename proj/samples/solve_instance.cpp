// Loads an instance, prints its MAIS bound, runs the method ladder and checks
// the resulting scheme.
//
//   solve_instance fixtures/ovia_pentagon.json [n]

#include <iostream>

#include "tim/io.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: solve_instance INSTANCE.json [n]\n";
    return 2;
  }
  try {
    const auto inst = tim::load_instance(argv[1]);
    const int n = argc > 2 ? std::stoi(argv[2]) : inst.n;
    const auto r = tim::best_scheme(inst.graph, n);
    std::cout << "nodes " << inst.graph.size() << ", edges " << inst.graph.edge_count() << "\n";
    std::cout << "bound " << r.bound.bound << " (acyclic set of " << r.bound.mais_size << ")\n";
    for (const auto& a : r.attempts)
      std::cout << "  " << tim::method_name(a.method) << " b=" << a.b << " C=" << a.c << ": "
                << (a.found ? "found" : a.budget_hit ? "budget" : "infeasible") << "\n";
    std::cout << "best " << r.dof << " via " << tim::method_name(r.method) << (r.optimal() ? " (reaches bound)" : "")
              << "\n";
    const auto rep = tim::verify(inst.graph, r.scheme);
    std::cout << "verified " << (rep.valid ? "yes" : "no") << "\n";
    std::cout << tim::scheme_to_json(r.scheme).dump(2) << "\n";
    return rep.valid ? 0 : 1;
  } catch (const tim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
