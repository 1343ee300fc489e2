// Grows a generic perfect-tree prefix and certifies its branches pairwise.
#include <iostream>

#include "oscforce/perfectset.hpp"

int main(int argc, char** argv) {
  using namespace oscforce;
  const std::size_t depth = argc > 1 ? std::stoul(argv[1]) : 6;

  const auto pg = pgeneric_tree(default_lifted_family(depth), depth);
  std::cout << "prefix height " << pg.prefix.m() << ", chain length " << pg.chain.size() << '\n';
  for (const auto& b : branches(pg.prefix)) std::cout << "  " << b.str() << '\n';

  const auto cert = perfect_mutual_cert(pg.generic, 2, default_cohen_family(2, depth), 4096);
  std::cout << cert.tuples.size() << " pairs: " << cert.met << " met, " << cert.not_met << " not met, "
            << cert.unknown << " unknown\n";
  return cert.ok() ? 0 : 1;
}
