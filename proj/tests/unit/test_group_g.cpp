#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

#include "fixtures.hpp"
#include "nortower/error.hpp"
#include "nortower/group_g.hpp"
#include "nortower/random.hpp"
#include "oracles.hpp"

namespace nortower {
namespace {

using testing::load_poset;

class ChainGroup : public ::testing::Test {
 protected:
  ChainGroup() : u(enumerate_gens(load_poset("chain.poset"))), g(u) {}
  // Generator ids under <*: (b>a;0), (b>a;1), (a;), (b;).
  static constexpr GenId ba0 = 0, ba1 = 1, a = 2, b = 3;
  UniversePtr u;
  GroupG g;
};

TEST_F(ChainGroup, OneRelationStep) {
  GroupElement p = g.multiply(g.gen(b), g.gen(ba0));
  EXPECT_EQ(p.word(), (std::vector<GenId>{ba1, b}));
  EXPECT_EQ(g.render(p), "(b>a;1)*(b;)");
  EXPECT_EQ(g.parse("(b;)*(b>a;0)"), p);
}

TEST_F(ChainGroup, SquareFollowsFromTheRelation) {
  // b*(b>a;0) = (b>a;1)*b, so ((b>a;0)*b)^2 = (b>a;0)*(b>a;1).
  const GroupElement x = g.parse("(b>a;0)*(b;)");
  EXPECT_EQ(g.multiply(x, x), g.parse("(b>a;0)*(b>a;1)"));
  EXPECT_TRUE(g.multiply(g.multiply(x, x), g.multiply(x, x)).is_identity());
  for (GenId y = 0; y < u->size(); ++y) EXPECT_TRUE(g.multiply(g.gen(y), g.gen(y)).is_identity());
}

TEST_F(ChainGroup, IdentityAndInverse) {
  for (const auto& x : g.enumerate()) {
    EXPECT_EQ(g.multiply(g.identity(), x), x);
    EXPECT_EQ(g.multiply(x, g.identity()), x);
    EXPECT_TRUE(g.multiply(x, g.inverse(x)).is_identity());
    EXPECT_TRUE(g.multiply(g.inverse(x), x).is_identity());
  }
  EXPECT_TRUE(g.inverse(g.identity()).is_identity());
  EXPECT_EQ(g.inverse(g.gen(ba0)), g.gen(ba0));
  GroupElement x = g.parse("(b>a;1)*(b;)");
  EXPECT_EQ(g.render(g.inverse(x)), "(b>a;0)*(b;)");
}

TEST_F(ChainGroup, Conjugate) {
  EXPECT_EQ(g.conjugate(g.gen(ba0), g.gen(b)), g.gen(ba1));
  EXPECT_EQ(g.conjugate(g.gen(ba0), g.identity()), g.gen(ba0));
  EXPECT_EQ(g.conjugate(g.gen(ba0), g.gen(a)), g.gen(ba0));
}

TEST_F(ChainGroup, InLevel) {
  EXPECT_TRUE(g.in_level(g.identity(), 0, LevelKind::Strict));
  EXPECT_FALSE(g.in_level(g.gen(b), 1, LevelKind::Strict));
  EXPECT_TRUE(g.in_level(g.gen(ba0), 0, LevelKind::Strict));
}

TEST_F(ChainGroup, EnumerateAndCosets) {
  auto elems = g.enumerate();
  EXPECT_EQ(elems.size(), 16u);
  EXPECT_EQ(std::set<GroupElement>(elems.begin(), elems.end()).size(), 16u);
  EXPECT_TRUE(g.coset_of(g.identity()).rep.is_identity());
  EXPECT_TRUE(g.coset_of(g.gen(ba0)).rep.is_identity());
  std::set<Coset> cosets;
  for (const auto& x : elems) cosets.insert(g.coset_of(x));
  EXPECT_EQ(cosets.size(), 8u);
  EXPECT_EQ(oracle::coset_class_count(g), 8u);
}

TEST(Enumerate, Sizes) {
  EXPECT_EQ(GroupG(enumerate_gens(make_chain(1))).enumerate().size(), 2u);
  EXPECT_EQ(GroupG(enumerate_gens(load_poset("w12.poset"))).enumerate().size(), 128u);
}

TEST(Multiply, UniverseMismatch) {
  GroupG g1(enumerate_gens(load_poset("chain.poset")));
  GroupG g2(enumerate_gens(load_poset("chain.poset")));
  try {
    g1.multiply(g1.gen(0), g2.gen(0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UniverseMismatch);
  }
}

TEST(Oracle, FullTablesAgreeOnSmallFixtures) {
  for (const auto& [name, p] : testing::table_fixtures()) {
    auto u = enumerate_gens(p);
    if (u->size() > 8) continue;
    GroupG g(u);
    LevelOracle oracle(u);
    auto elems = g.enumerate();
    for (const auto& x : elems)
      for (const auto& y : elems) {
        const auto product = oracle.multiply(oracle.from_element(x), oracle.from_element(y));
        ASSERT_EQ(oracle.to_word(product), g.multiply(x, y).word()) << name;
      }
  }
}

TEST(Oracle, IdentityAndGeneratorOrder) {
  auto u = enumerate_gens(load_poset("w13.poset"));
  GroupG g(u);
  LevelOracle oracle(u);
  for (GenId x = 0; x < u->size(); ++x) {
    auto v = oracle.from_element(g.gen(x));
    EXPECT_EQ(oracle.multiply(v, v), oracle.identity());
    EXPECT_EQ(oracle.multiply(v, oracle.identity()), v);
    EXPECT_EQ(oracle.multiply(oracle.identity(), v), v);
  }
}

TEST(Oracle, RandomTriplesOnW23) {
  auto u = enumerate_gens(load_poset("w23.poset"));
  ASSERT_EQ(u->size(), 17u);
  GroupG g(u);
  LevelOracle oracle(u);
  Rng rng(11);
  const Mask full = (Mask{1} << u->size()) - 1;
  for (int i = 0; i < 100000; ++i) {
    const Mask a = rng.next() & full, b = rng.next() & full, c = rng.next() & full;
    const Mask ab = g.multiply_masks(a, b);
    auto via_oracle = oracle.multiply(oracle.from_element(g.from_mask(a)),
                                      oracle.from_element(g.from_mask(b)));
    ASSERT_EQ(g.from_mask(ab).word(), oracle.to_word(via_oracle));
    ASSERT_EQ(g.multiply_masks(ab, c), g.multiply_masks(a, g.multiply_masks(b, c)));
  }
}

TEST(Rewriting, NeverLengthens) {
  for (const auto& [name, p] : testing::table_fixtures()) {
    GroupG g(enumerate_gens(p));
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
      std::vector<GenId> word(rng.below(12));
      for (auto& x : word) x = static_cast<GenId>(rng.below(g.universe().size()));
      auto out = g.from_word(word);
      EXPECT_LE(out.length(), word.size());
      EXPECT_TRUE(std::is_sorted(out.word().begin(), out.word().end()));
      EXPECT_EQ(std::adjacent_find(out.word().begin(), out.word().end()), out.word().end());
    }
  }
}

TEST(Levels, Nested) {
  GroupG g(enumerate_gens(load_poset("w13.poset")));
  for (const auto& x : g.enumerate())
    for (int alpha = 0; alpha < 3; ++alpha) {
      if (g.in_level(x, alpha, LevelKind::Strict)) {
        EXPECT_TRUE(g.in_level(x, alpha + 1, LevelKind::Strict));
        EXPECT_TRUE(g.in_level(x, alpha, LevelKind::Weak));
      }
    }
}

TEST(Cosets, CountTimesLevelIsOrder) {
  for (const auto& [name, p] : testing::table_fixtures()) {
    GroupG g(enumerate_gens(p));
    std::set<Coset> cosets;
    for (const auto& x : g.enumerate()) {
      Coset c = g.coset_of(x);
      cosets.insert(c);
      EXPECT_TRUE(g.same_coset(c.rep, x));
      EXPECT_LE(c.rep, x);
    }
    const std::size_t below = g.universe().level_set(0, LevelKind::Strict).size();
    EXPECT_EQ(cosets.size() << below, std::size_t{1} << g.universe().size()) << name;
    EXPECT_EQ(cosets.size(), std::size_t{1} << g.coset_count_log2());
    if (g.universe().size() <= 7) EXPECT_EQ(oracle::coset_class_count(g), cosets.size()) << name;
  }
}

TEST(CosetKey, OneKeyPerExhaustiveClass) {
  for (const auto& [name, p] : testing::table_fixtures()) {
    GroupG g(enumerate_gens(p));
    std::map<Coset, GroupElement> key_of;
    std::set<GroupElement> keys;
    for (const auto& x : g.enumerate()) {
      const GroupElement key = g.coset_key(x);
      EXPECT_TRUE(g.same_coset(key, x)) << name;
      EXPECT_EQ(g.coset_key(key), key);
      auto [it, fresh] = key_of.emplace(g.coset_of(x), key);
      if (!fresh) EXPECT_EQ(it->second, key) << name << " " << g.render(x);
      keys.insert(key);
    }
    EXPECT_EQ(keys.size(), key_of.size()) << name;
  }
}

TEST(CosetKey, InvariantUnderBelowZeroOnLargeUniverse) {
  // Four-chain: 40 generators, 25 below level 0, too many to enumerate a coset.
  auto u = enumerate_gens(make_chain(4), 64);
  GroupG g(u);
  const std::vector<GenId> below = u->level_set(0, LevelKind::Strict);
  Rng rng(12);
  auto random_word = [&](const std::vector<GenId>& pool, std::size_t len) {
    std::vector<GenId> w(len);
    for (auto& x : w) x = pool[rng.below(pool.size())];
    return g.from_word(w);
  };
  std::vector<GenId> all(u->size());
  std::iota(all.begin(), all.end(), 0);
  for (int i = 0; i < 2000; ++i) {
    const GroupElement x = random_word(all, rng.below(10));
    const GroupElement h = random_word(below, rng.below(8));
    const GroupElement y = random_word(all, rng.below(10));
    EXPECT_EQ(g.coset_key(g.multiply(x, h)), g.coset_key(x));
    EXPECT_EQ(g.coset_key(x) == g.coset_key(y), g.same_coset(x, y));
  }
}

TEST(Subgroups, ClosureCheck) {
  GroupG g(enumerate_gens(load_poset("chain.poset")));
  for (int alpha = 0; alpha <= 2; ++alpha)
    EXPECT_NO_THROW(g.subgroup_from_gens(g.universe().level_set(alpha, LevelKind::Strict)));
  EXPECT_NO_THROW(g.subgroup_from_gens({0}));
  try {
    g.subgroup_from_gens({3, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotConjClosed);
  }
  auto s = g.subgroup_from_gens({3, 0, 1});
  EXPECT_TRUE(s.contains(g.parse("(b>a;1)*(b;)")));
  EXPECT_FALSE(s.contains(g.gen(2)));
}

TEST(Subgroups, SubposetGroupsIntersect) {
  // G of a sub-poset is the set of words over its own chains; check closure
  // and the intersection law on every pair of sub-posets.
  Poset p = load_poset("w12.poset");
  GroupG g(enumerate_gens(p));
  auto elems = g.enumerate();
  auto within = [&](const GroupElement& x, unsigned subset) {
    for (GenId y : x.word())
      for (ElemId t : g.universe().gen(y).tbar)
        if (!((subset >> t) & 1)) return false;
    return true;
  };
  for (unsigned s1 = 0; s1 < 8; ++s1) {
    for (const auto& x : elems)
      for (const auto& y : elems)
        if (within(x, s1) && within(y, s1)) ASSERT_TRUE(within(g.multiply(x, y), s1));
    for (unsigned s2 = 0; s2 < 8; ++s2)
      for (const auto& x : elems)
        EXPECT_EQ(within(x, s1) && within(x, s2), within(x, s1 & s2));
  }
}

}  // namespace
}  // namespace nortower
