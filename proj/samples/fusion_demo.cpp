// Fuses a labelled tree of Cohen conditions and prints each node's labels.
#include <iostream>

#include "oscforce/forcing.hpp"

int main() {
  using namespace oscforce;
  const auto poset = cohen_poset(1);
  const auto lab = unary_gap_labeler(0);
  const auto reqs = random_open_reqs(7, 3);

  const auto tree = fuse_generic_tree(poset, reqs, lab, {0, 1, 2}, 2);
  for (const auto& [t, node] : tree.nodes) {
    std::cout << (t.empty() ? std::string("<root>") : index_key(t)) << ": " << node.condition.size()
              << " cells, labels";
    for (Nat v : node.labels) std::cout << ' ' << v;
    std::cout << '\n';
  }

  const auto report = check_fusion(tree, poset, reqs, lab);
  for (const auto& c : report.checks) {
    std::cout << c.name << ": " << (c.passed() ? "pass" : "fail: " + c.first_detail) << '\n';
  }
  return report.ok() ? 0 : 1;
}
