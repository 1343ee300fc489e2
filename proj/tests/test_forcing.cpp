#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "oscforce/forcing.hpp"

using namespace oscforce;

namespace {

CohenCondition cohen(std::vector<std::tuple<Nat, Nat, int>> cells) {
  std::vector<CohenCondition::Cell> out;
  for (auto [n, i, b] : cells) out.push_back({{n, i}, b != 0});
  return CohenCondition(std::move(out));
}

// Every condition on the grid n < 4, i < 2 with at most max_cells cells.
std::vector<CohenCondition> grid_conditions(std::size_t max_cells) {
  std::vector<CohenCondition> out;
  Nat total = 1;
  for (int c = 0; c < 8; ++c) total *= 3;
  for (Nat code = 0; code < total; ++code) {
    std::vector<CohenCondition::Cell> cells;
    Nat rest = code;
    for (Nat c = 0; c < 8; ++c, rest /= 3) {
      if (rest % 3 != 0) cells.push_back({{c / 2, c % 2}, rest % 3 == 2});
    }
    if (cells.size() <= max_cells) out.push_back(CohenCondition(std::move(cells)));
  }
  return out;
}

template <class P>
void check_order_axioms(const P& poset, const std::vector<typename P::condition_type>& conds) {
  for (const auto& p : conds) {
    ASSERT_TRUE(poset.leq(p, p));
    ASSERT_TRUE(poset.leq(p, poset.root()));
    for (const auto& q : conds) {
      if (poset.leq(p, q) && poset.leq(q, p)) { ASSERT_EQ(p, q); }
      const auto m = poset.meet(p, q);
      ASSERT_EQ(m.has_value(), poset.compatible(p, q));
      if (m) {
        ASSERT_TRUE(poset.leq(*m, p));
        ASSERT_TRUE(poset.leq(*m, q));
      }
      for (const auto& r : conds) {
        if (poset.leq(p, q) && poset.leq(q, r)) { ASSERT_TRUE(poset.leq(p, r)); }
        if (m && poset.leq(r, p) && poset.leq(r, q)) { ASSERT_TRUE(poset.leq(r, *m)); }
      }
    }
  }
}

}  // namespace

TEST(PartialFunction, Basics) {
  EXPECT_THROW(cohen({{0, 0, 1}, {0, 0, 0}}), Error);
  auto p = cohen({{1, 0, 1}, {0, 1, 0}});
  EXPECT_EQ(p.cells().front().first, (CohenKey{0, 1}));
  EXPECT_EQ(p.get({1, 0}), true);
  EXPECT_FALSE(p.get({2, 0}).has_value());
  EXPECT_THROW(p.with({1, 0}, false), Error);
  EXPECT_EQ(p.with({1, 0}, true), p);
}

TEST(CohenPoset, Examples) {
  const auto poset = cohen_poset(1);
  const auto one = cohen({{0, 0, 1}});
  EXPECT_TRUE(poset.leq(one, poset.root()));
  EXPECT_FALSE(poset.compatible(one, cohen({{0, 0, 0}})));
  auto m = poset.meet(one, cohen({{1, 0, 0}}));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->size(), 2u);
  EXPECT_FALSE(poset.valid(cohen({{0, 1, 0}})));
}

TEST(CohenPoset, OrderAxiomsOnSmallGridConditions) {
  check_order_axioms(cohen_poset(2), grid_conditions(3));
}

TEST(CollapsePoset, Examples) {
  EXPECT_THROW(collapse_poset(0), Error);
  const auto one = collapse_poset(1);
  EXPECT_TRUE(one.valid(CollapseCondition({{0, 0}, {5, 0}})));
  EXPECT_FALSE(one.valid(CollapseCondition({{0, 1}})));
  const auto three = collapse_poset(3);
  EXPECT_TRUE(three.leq(CollapseCondition({{0, 2}, {1, 0}}), CollapseCondition({{0, 2}})));
}

TEST(CollapsePoset, OrderAxioms) {
  std::vector<CollapseCondition> conds;
  for (Nat code = 0; code < 64; ++code) {  // maps {0,1,2} -> {undefined, 0, 1, 2}
    std::vector<CollapseCondition::Cell> cells;
    for (Nat n = 0; n < 3; ++n) {
      const Nat v = (code >> (2 * n)) & 3U;
      if (v != 0) cells.push_back({n, v - 1});
    }
    conds.push_back(CollapseCondition(std::move(cells)));
  }
  check_order_axioms(collapse_poset(3), conds);
}

TEST(RsGeneric, CohenCells) {
  std::vector<DenseReq<CohenCondition>> reqs;
  for (Nat n = 0; n < 5; ++n) reqs.push_back(cell_defined(n, 0));
  const auto poset = cohen_poset(1);
  const auto chain = rs_generic(poset, reqs, poset.root());
  ASSERT_EQ(chain.size(), 6u);
  EXPECT_EQ(chain.back().size(), 5u);
  for (std::size_t n = 1; n < chain.size(); ++n) {
    EXPECT_TRUE(poset.leq(chain[n], chain[n - 1]));
    EXPECT_TRUE(reqs[n - 1].member(chain[n]));
    EXPECT_LE(chain[n].size(), chain[n - 1].size() + 1);
  }
  EXPECT_EQ(rs_generic(poset, {}, poset.root()).size(), 1u);
}

TEST(RsGeneric, CollapseSurjection) {
  std::vector<DenseReq<CollapseCondition>> reqs;
  for (Nat n = 0; n < 4; ++n) reqs.push_back(in_domain(n));
  for (Nat b = 0; b < 3; ++b) reqs.push_back(in_range(b));
  const auto poset = collapse_poset(3);
  const auto final = rs_generic(poset, reqs, poset.root()).back();
  EXPECT_EQ(final, CollapseCondition({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 1}, {5, 2}}));
  std::set<Nat> range;
  for (const auto& [n, b] : final) range.insert(b);
  EXPECT_EQ(range, (std::set<Nat>{0, 1, 2}));
}

TEST(RsGeneric, ReportsFailingRequirementIndex) {
  DenseReq<CohenCondition> liar{"liar", [](const CohenCondition& p) { return p.size() > 3; },
                                [](const CohenCondition& p) { return p; }, true};
  const auto poset = cohen_poset(1);
  try {
    rs_generic(poset, {cell_defined(0, 0), liar}, poset.root());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::refine_failure);
    EXPECT_NE(std::string(e.what()).find("requirement 1"), std::string::npos);
  }
  DenseReq<CohenCondition> weakens{"weakens", [](const CohenCondition&) { return true; },
                                   [](const CohenCondition&) { return CohenCondition{}; }, true};
  EXPECT_THROW(rs_generic(poset, {cell_defined(0, 0), weakens}, poset.root()), Error);
  EXPECT_THROW(rs_generic(poset, {}, cohen({{0, 3, 1}})), Error);
}

TEST(Requirements, RefinersMeetThemselves) {
  std::mt19937_64 rng(3);
  const std::vector<DenseReq<CohenCondition>> reqs{
      cell_defined(3, 1),          defined_upto(0, 5),
      coordinates_differ(0, 1),    joint_pattern({BitWord("10"), BitWord("01")}),
      pattern_after(1, BitWord("111"), 4)};
  for (int trial = 0; trial < 400; ++trial) {
    std::vector<CohenCondition::Cell> cells;
    for (Nat n = 0; n < 8; ++n) {
      for (Nat i = 0; i < 2; ++i) {
        if (rng() % 3 == 0) cells.push_back({{n, i}, (rng() & 1U) != 0});
      }
    }
    const CohenCondition p(std::move(cells));
    for (const auto& r : reqs) {
      const auto q = r.refine(p);
      ASSERT_TRUE(p.subset_of(q)) << r.name;
      ASSERT_TRUE(r.member(q)) << r.name;
      // open: any extension of a member stays a member
      ASSERT_TRUE(r.member(q.with({20, 0}, true))) << r.name;
    }
  }
}

TEST(TupleCondition, Examples) {
  EXPECT_EQ(tuple_condition({BitWord("01")}), cohen({{0, 0, 0}, {1, 0, 1}}));
  EXPECT_TRUE(tuple_condition({}).empty());
  EXPECT_EQ(tuple_condition({BitWord("1"), BitWord("0")}), cohen({{0, 0, 1}, {0, 1, 0}}));
}

TEST(MutualGenericity, Examples) {
  const BitWord b("0110");
  auto same = mutual_genericity_check({b, b}, {coordinates_differ(0, 1)}, 64);
  EXPECT_EQ(same.front().kind, Genericity::not_met_on_window);

  auto zero = mutual_genericity_check({b, BitWord("1110")}, {coordinates_differ(0, 1)}, 0);
  EXPECT_EQ(zero.front().kind, Genericity::unknown);

  auto met = mutual_genericity_check({BitWord("0110"), BitWord("0100")}, {coordinates_differ(0, 1)}, 64);
  ASSERT_EQ(met.front().kind, Genericity::met);
  // least cutoff: the reals first differ at position 2
  EXPECT_EQ(*met.front().witness, tuple_condition({BitWord("011"), BitWord("010")}));

  EXPECT_THROW(mutual_genericity_check({BitWord("")}, {}, 4), Error);
}

TEST(MutualGenericity, NonOpenRequirementsUseSubsetSearch) {
  // Exactly one cell defined: not open, and not met by any prefix of length >= 2.
  DenseReq<CohenCondition> single{"single", [](const CohenCondition& p) { return p.size() == 1 && p.get({1, 0}) == true; },
                                  [](const CohenCondition& p) { return p; }, false};
  auto v = mutual_genericity_check({BitWord("01")}, {single}, 64);
  ASSERT_EQ(v.front().kind, Genericity::met);
  EXPECT_EQ(*v.front().witness, cohen({{1, 0, 1}}));
  auto starved = mutual_genericity_check({BitWord("01")}, {single}, 4);
  EXPECT_EQ(starved.front().kind, Genericity::unknown);
  auto never = mutual_genericity_check({BitWord("00")}, {single}, 64);
  EXPECT_EQ(never.front().kind, Genericity::not_met_on_window);
}

TEST(MutualGenericity, WitnessesAreSound) {
  std::mt19937_64 rng(8);
  const std::vector<DenseReq<CohenCondition>> reqs{
      coordinates_differ(0, 1), joint_pattern({BitWord("1"), BitWord("1")}), defined_upto(1, 5),
      pattern_after(0, BitWord("10"), 3)};
  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<BitWord> reals{BitWord(oracle::random_bits(rng, 1 + rng() % 12)),
                                     BitWord(oracle::random_bits(rng, 1 + rng() % 12))};
    const auto full = tuple_condition(reals);
    for (const auto& v : mutual_genericity_check(reals, reqs, 32)) {
      if (v.kind == Genericity::met) {
        ASSERT_TRUE(v.witness->subset_of(full));
      } else {
        ASSERT_FALSE(v.witness.has_value());
      }
      ASSERT_LE(v.evaluations, 32u);
    }
  }
}

TEST(UnaryLabeler, CertifyMatchesDecoding) {
  const auto lab = unary_gap_labeler(0);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    const auto bits = oracle::random_bits(rng, rng() % 20);
    const auto p = tuple_condition({BitWord(bits)});
    const auto decoded = oracle::unary_decode(bits);
    EXPECT_TRUE(lab.certify(p, IncSeq(decoded)));
    for (std::size_t k = 0; k <= decoded.size(); ++k) {
      EXPECT_TRUE(lab.certify(p, IncSeq(std::vector<Nat>(decoded.begin(), decoded.begin() + k))));
    }
    auto longer = decoded;
    longer.push_back(decoded.empty() ? 0 : decoded.back() + 1);
    EXPECT_FALSE(lab.certify(p, IncSeq(longer)));
  }
}

TEST(UnaryLabeler, ExtendContract) {
  const auto lab = unary_gap_labeler(0);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 300; ++trial) {
    // contiguous prefix plus scattered cells further out
    auto bits = oracle::random_bits(rng, rng() % 10);
    std::vector<CohenCondition::Cell> cells;
    for (Nat n = 0; n < bits.size(); ++n) cells.push_back({{n, 0}, bits[n] == '1'});
    for (Nat n = bits.size() + 1; n < bits.size() + 12; ++n) {
      if (rng() % 4 == 0) cells.push_back({{n, 0}, (rng() & 1U) != 0});
    }
    const CohenCondition p(std::move(cells));
    const IncSeq s(oracle::unary_decode(bits));
    const Nat floor = rng() % 30;
    const auto out = lab.extend(p, s, floor);
    ASSERT_TRUE(out);
    const auto& [q, s2] = *out;
    ASSERT_TRUE(p.subset_of(q));
    ASSERT_TRUE(s.is_prefix_of(s2));
    ASSERT_GT(s2.size(), s.size());
    ASSERT_TRUE(std::any_of(s2.begin() + static_cast<std::ptrdiff_t>(s.size()), s2.end(),
                            [&](Nat v) { return v > floor; }));
    // q's cells on coordinate 0 form an initial segment, decoded independently
    std::string contiguous;
    for (const auto& [key, bit] : q) {
      ASSERT_EQ(key.n, contiguous.size());
      contiguous.push_back(bit ? '1' : '0');
    }
    ASSERT_EQ(std::vector<Nat>(s2.begin(), s2.end()), oracle::unary_decode(contiguous));
  }
  EXPECT_FALSE(lab.extend(tuple_condition({BitWord("10")}), IncSeq{5}, 0).has_value());
}

TEST(Fusion, DepthZero) {
  const auto poset = cohen_poset(1);
  const auto reqs = random_open_reqs(4, 1);
  const auto lab = unary_gap_labeler(0);
  const auto tree = fuse_generic_tree(poset, reqs, lab, {0, 1}, 0);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_TRUE(reqs[0].member(tree.nodes.at({}).condition));
  EXPECT_TRUE(check_fusion(tree, poset, reqs, lab).ok());
  EXPECT_THROW(fuse_generic_tree(poset, reqs, lab, {0, 1}, 1), Error);
}

TEST(Fusion, ThirteenNodeTree) {
  const auto poset = cohen_poset(1);
  const std::vector<DenseReq<CohenCondition>> reqs{cell_defined(8, 0), pattern_after(0, BitWord("11"), 5),
                                                   cell_defined(30, 0)};
  const auto lab = unary_gap_labeler(0);
  const auto tree = fuse_generic_tree(poset, reqs, lab, {0, 1, 2}, 2);
  EXPECT_EQ(tree.nodes.size(), 13u);
  const auto report = check_fusion(tree, poset, reqs, lab);
  for (const auto& c : report.checks) { EXPECT_TRUE(c.passed()) << c.name << ": " << c.first_detail; }
}

TEST(Fusion, BranchesGiveDistinctIncomparableSequences) {
  const auto poset = cohen_poset(1);
  const auto lab = unary_gap_labeler(0);
  for (Nat seed = 1; seed <= 5; ++seed) {
    const auto reqs = random_open_reqs(seed, 4);
    const auto tree = fuse_generic_tree(poset, reqs, lab, {0, 2, 5}, 3);
    std::vector<std::pair<IndexWord, std::vector<Nat>>> leaves;
    for (const auto& [t, node] : tree.nodes) {
      if (t.size() != 3) continue;
      std::string bits;
      for (const auto& [key, bit] : node.condition) {
        if (key.n != bits.size()) break;
        bits.push_back(bit ? '1' : '0');
      }
      const auto decoded = oracle::unary_decode(bits);
      ASSERT_EQ(decoded, node.labels.entries());
      leaves.push_back({t, decoded});
    }
    ASSERT_EQ(leaves.size(), 27u);
    for (std::size_t a = 0; a < leaves.size(); ++a) {
      for (std::size_t b = a + 1; b < leaves.size(); ++b) {
        const IncSeq sa(leaves[a].second), sb(leaves[b].second);
        ASSERT_TRUE(incomparable(sa, sb));
      }
    }
  }
}

TEST(Fusion, ChildLabelsPreserveOrder) {
  const auto poset = cohen_poset(1);
  const auto lab = unary_gap_labeler(0);
  const auto reqs = random_open_reqs(9, 3);
  const auto tree = fuse_generic_tree(poset, reqs, lab, {3, 0, 7}, 2);
  EXPECT_EQ(tree.label_sample, (std::vector<Nat>{0, 3, 7}));
  for (const auto& [t, node] : tree.nodes) {
    if (t.size() >= 2) continue;
    Nat previous = 0;
    bool first = true;
    for (Nat a : tree.label_sample) {
      auto child = t;
      child.push_back(a);
      const Nat f = tree.nodes.at(child).labels[node.labels.size()];
      EXPECT_GT(f, a);
      if (!first) { EXPECT_GT(f, previous); }
      previous = f;
      first = false;
    }
  }
}

TEST(Fusion, CheckerCatchesTampering) {
  const auto poset = cohen_poset(1);
  const auto lab = unary_gap_labeler(0);
  const auto reqs = random_open_reqs(2, 3);
  auto tree = fuse_generic_tree(poset, reqs, lab, {0, 1}, 2);
  tree.nodes.at({1}).labels = tree.nodes.at({0}).labels;
  const auto report = check_fusion(tree, poset, reqs, lab);
  EXPECT_FALSE(report.ok());
  EXPECT_FALSE(report.checks[1].passed());  // no longer certified
}

TEST(Fusion, RejectsBrokenLabeler) {
  Labeler<CohenCondition> stuck;
  stuck.certify = [](const CohenCondition&, const IncSeq&) { return true; };
  stuck.extend = [](const CohenCondition& p, const IncSeq& s, Nat) {
    return std::optional(std::pair{p, s.extended(s.empty() ? 0 : s.back() + 1)});
  };
  const auto poset = cohen_poset(1);
  try {
    fuse_generic_tree(poset, random_open_reqs(1, 2), stuck, {5}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::labeler_violation);
  }
}
