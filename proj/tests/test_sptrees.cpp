#include <gtest/gtest.h>

#include "oscforce/sptrees.hpp"

using namespace oscforce;

namespace {

template <class A>
bool closed(const TreeOracle<A>& tree, const TreeNode<A>& node) {
  for (std::size_t len = 0; len <= node.size(); ++len) {
    if (!tree.contains(std::span(node.data(), len))) return false;
  }
  return true;
}

// Every node reachable through children() up to depth, at a small budget.
template <class A>
std::vector<TreeNode<A>> surface(const TreeOracle<A>& tree, std::size_t depth, std::size_t budget) {
  std::vector<TreeNode<A>> all{{}};
  std::vector<TreeNode<A>> level{{}};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<TreeNode<A>> next;
    for (const auto& node : level) {
      for (const auto& v : tree.children(node, budget)) {
        auto child = node;
        child.push_back(v);
        next.push_back(child);
      }
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return all;
}

}  // namespace

TEST(FullTree, Membership) {
  auto t = full_tree<Omega>();
  EXPECT_TRUE(t->contains(std::vector<Nat>{}));
  EXPECT_TRUE(t->contains(std::vector<Nat>{0, 3, 9}));
  EXPECT_FALSE(t->contains(std::vector<Nat>{3, 3}));
  EXPECT_EQ(t->children(std::vector<Nat>{4}, 3), (std::vector<Nat>{5, 6, 7}));
}

TEST(EvenTree, ChildrenAndGraft) {
  auto even = even_tree();
  EXPECT_EQ(even->children(std::vector<Nat>{2}, 4), (std::vector<Nat>{4, 6}));
  EXPECT_FALSE(even->contains(std::vector<Nat>{2, 5}));
  auto g = graft<Omega>(full_tree<Omega>(), even_tree());
  for (const auto& node : surface(*even, 3, 8)) {
    EXPECT_EQ(g->contains(node), even->contains(node));
    EXPECT_EQ(g->children(node, 8), even->children(node, 8));
  }
  EXPECT_TRUE(validate_tree(*g, 3, 8).ok());
}

TEST(CombTree, SplitsOnlyAtEvenLengths) {
  auto comb = comb_tree();
  EXPECT_EQ(comb->children(std::vector<Nat>{4}, 10), (std::vector<Nat>{5}));
  auto s = comb->split_above(std::vector<Nat>{4}, 4);
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (std::vector<Nat>{4, 5}));
  EXPECT_FALSE(comb->split_above(std::vector<Nat>{4}, 0));
  EXPECT_TRUE(validate_tree(*comb, 3, 8).ok());
}

TEST(ConstraintTree, DepthSpecificConstraints) {
  auto t = constraint_tree({{0, 3, 1}, {std::nullopt, 2, 1}});
  EXPECT_TRUE(t->contains(std::vector<Nat>{1, 3, 5}));
  EXPECT_FALSE(t->contains(std::vector<Nat>{3}));
  EXPECT_FALSE(t->contains(std::vector<Nat>{7, 8}));
  EXPECT_THROW(constraint_tree({{std::nullopt, 0, 0}}), Error);
  EXPECT_THROW(constraint_tree({{std::nullopt, 2, 2}}), Error);
}

TEST(RandTree, ValidatesAtDepthFour) {
  EXPECT_TRUE(validate_tree(*rand_sptree<Omega>(1), 4, 16).ok());
  EXPECT_TRUE(validate_tree(*rand_sptree<LexOmega2>(1), 3, 64).ok());
}

TEST(RandTree, Reproducible) {
  auto a = rand_sptree<Omega>(42);
  auto b = rand_sptree<Omega>(42);
  for (const auto& node : surface(*a, 3, 6)) { EXPECT_EQ(a->children(node, 64), b->children(node, 64)); }
  auto c = rand_sptree<Omega>(43);
  bool differs = false;
  for (const auto& node : surface(*a, 2, 6)) differs = differs || a->children(node, 64) != c->children(node, 64);
  EXPECT_TRUE(differs);
}

TEST(RandTree, SplitNodeWithinBudgetFromSurfacedNodes) {
  for (Nat seed = 1; seed <= 50; ++seed) {
    auto t = rand_sptree<Omega>(seed);
    for (const auto& node : surface(*t, 3, 3)) {
      auto s = split_node(*t, std::span<const Nat>(node), 1024);
      ASSERT_TRUE(closed(*t, s));
      ASSERT_GE(t->children(s, 64).size(), 2u);
    }
  }
}

TEST(Trees, DownwardClosureOfSurfacedNodes) {
  std::vector<TreePtr<Omega>> trees{full_tree<Omega>(), even_tree(), comb_tree(), rand_sptree<Omega>(3),
                                    graft<Omega>(rand_sptree<Omega>(5), even_tree())};
  for (const auto& t : trees) {
    for (const auto& node : surface(*t, 4, 3)) {
      ASSERT_TRUE(closed(*t, node)) << t->describe();
      if (auto s = t->split_above(node, 64)) { ASSERT_TRUE(closed(*t, *s)) << t->describe(); }
    }
  }
}

TEST(ChildAbove, IncreasingThresholdsGiveIncreasingValues) {
  std::vector<TreePtr<Omega>> trees{full_tree<Omega>(), even_tree(), rand_sptree<Omega>(9)};
  for (const auto& t : trees) {
    const auto root = split_node(*t, std::span<const Nat>(), 64);
    std::optional<Nat> threshold;
    Nat previous = 0;
    for (int step = 0; step < 20; ++step) {
      const Nat v = child_above(*t, std::span<const Nat>(root), threshold, 256);
      if (step > 0) { ASSERT_GT(v, previous); }
      // least admissible: nothing between the threshold and v is a child
      auto probe = root;
      for (Nat w = threshold ? *threshold + 1 : 0; w < v; ++w) {
        probe.push_back(w);
        if (root.empty() || w > root.back()) { ASSERT_FALSE(t->contains(probe)) << t->describe(); }
        probe.pop_back();
      }
      previous = v;
      threshold = v;
    }
  }
}

TEST(ChildAbove, BudgetExhaustion) {
  auto comb = comb_tree();
  try {
    child_above(*comb, std::span<const Nat>(std::vector<Nat>{4}), Nat{5}, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::budget_exhausted);
  }
}

TEST(ValidateTree, RefutesBrokenPromises) {
  // Even entries and odd entries at once: the root is empty of children.
  auto bad = graft<Omega>(even_tree(), constraint_tree({{std::nullopt, 2, 1}}));
  auto report = validate_tree(*bad, 2, 8);
  ASSERT_FALSE(report.ok());
  EXPECT_EQ(report.violations.front().kind, "split-no-children");

  // An oracle whose promise does not extend its argument.
  struct Liar final : TreeOracle<Omega> {
    std::string describe() const override { return "liar"; }
    bool contains(std::span<const Nat> node) const override { return strictly_increasing(node); }
    std::optional<Node> split_above(std::span<const Nat>, std::size_t) const override { return Node{99}; }
  } liar;
  auto r2 = validate_tree(liar, 1, 4);
  ASSERT_FALSE(r2.ok());
  EXPECT_EQ(r2.violations.back().kind, "split-not-extension");
  EXPECT_THROW(split_node(liar, std::span<const Nat>(std::vector<Nat>{1}), 4), Error);
}

TEST(LexAlphabet, EncodingAndSearchOrder) {
  for (Nat code = 0; code < 2000; ++code) { ASSERT_EQ(LexOmega2::encode(LexOmega2::decode(code)), code); }
  const LexPair floor{3, 7};
  std::set<std::pair<Nat, Nat>> seen;
  for (Nat j = 0; j < 500; ++j) {
    const auto v = LexOmega2::above(floor, j);
    ASSERT_LT(floor, v);
    seen.insert({v.major, v.minor});
  }
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_TRUE(seen.count({3, 8}));
  EXPECT_TRUE(seen.count({4, 0}));
  for (Nat k = 1; k < 50; ++k) { EXPECT_LT(LexOmega2::cofinal(k - 1), LexOmega2::cofinal(k)); }
}
