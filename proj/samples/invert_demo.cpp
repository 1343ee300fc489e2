// Builds three branches of a random superperfect tree whose coloring spells a
// chosen word, then re-reads the coloring from the branches.
#include <iostream>

#include "oscforce/oscillation.hpp"

int main(int argc, char** argv) {
  using namespace oscforce;
  const BitWord target(argc > 1 ? argv[1] : "0110");
  const Nat seed = argc > 2 ? std::stoull(argv[2]) : 3;

  const auto tree = rand_sptree<Omega>(seed);
  const auto inv = invert(*tree, target, 256);

  auto show = [](const char* name, const std::vector<Nat>& v) {
    std::cout << name << " =";
    for (Nat n : v) std::cout << ' ' << n;
    std::cout << '\n';
  };
  show("x", inv.x);
  show("y", inv.y);
  show("z", inv.z);

  const auto c = color(inv.x, inv.y, inv.z, target.size());
  std::cout << "oscillation points:";
  for (Nat n : c.indices) std::cout << ' ' << n;
  std::cout << "\ncolor " << c.bits.str() << " (target " << target.str() << ")\n";

  const auto problems = verify_inversion(*tree, inv, target);
  for (const auto& p : problems) std::cout << "problem: " << p << '\n';
  return problems.empty() ? 0 : 1;
}
