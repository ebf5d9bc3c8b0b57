#include <gtest/gtest.h>

#include <set>

#include "fixtures.hpp"
#include "nortower/descriptors.hpp"
#include "nortower/error.hpp"

namespace nortower {
namespace {

using testing::load_poset;

QfType type_of(std::vector<ElemId> t, const Poset& p) { return qf_type(t, p); }

Descriptor0 d0(std::string_view text, std::size_t k) { return parse_descriptor0(text, k); }
Descriptor2 d2(std::string_view text, std::size_t k) { return parse_descriptor2(text, k); }

struct Small {
  explicit Small(const Poset& p) : r(p) {}
  Realization r;
};

// Code assignments on k points that are consistent, counted by brute force.
std::size_t consistent_code_count(std::size_t k) {
  std::size_t pairs = k * (k - 1) / 2, count = 0;
  std::size_t total = 1;
  for (std::size_t i = 0; i < pairs; ++i) total *= 4;
  for (std::size_t m = 0; m < total; ++m) {
    std::vector<std::vector<int>> c(k, std::vector<int>(k, 1));
    std::size_t x = m;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        c[a][b] = static_cast<int>(x % 4);
        x /= 4;
        c[b][a] = c[a][b] == 0 ? 2 : c[a][b] == 2 ? 0 : c[a][b];
      }
    bool ok = true;
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t d = 0; d < k; ++d) {
          if (c[a][b] == 1 && c[b][d] != c[a][d]) ok = false;
          if (c[a][b] == 0 && c[b][d] == 0 && c[a][d] != 0) ok = false;
        }
    count += ok;
  }
  return count;
}

TEST(Descriptor, TextRoundTrip) {
  const Descriptor2 d = d2("(0,1|0);(2|)||(1,0|1)", 3);
  EXPECT_EQ(render(d), "(0,1|0);(2|)||(1,0|1)");
  EXPECT_EQ(render(d2("-", 2)), "-");
  EXPECT_THROW(d0("(0,1|)", 2), Error);
  EXPECT_THROW(d0("(0,2|0)", 2), Error);
  EXPECT_THROW(d0("0,1|0", 2), Error);
  EXPECT_THROW(d2("-||-", 2), Error);
}

TEST(Descriptor, Support) {
  EXPECT_TRUE(support(d0("-", 2)).empty());
  EXPECT_EQ(support(d0("(0,1|0)", 2)), (std::set<Index>{0, 1}));
  EXPECT_EQ(support(d2("(0|)||(2,1|1)", 3)), (std::set<Index>{0, 1, 2}));
}

TEST(Eval0, SpecCases) {
  const Poset chain = load_poset("chain.poset");
  Small s(chain);
  const ElemId a = *chain.find("a"), b = *chain.find("b");
  const auto gen = s.r.g().universe().find(ChainGen{{b, a}, {0}});
  ASSERT_TRUE(gen);
  const std::vector<ElemId> ba{b, a}, ab{a, b};
  EXPECT_EQ(eval0(ba, d0("(0,1|0)", 2), s.r.g()), s.r.g().gen(*gen));
  EXPECT_TRUE(eval0(ab, d0("(0,1|0)", 2), s.r.g()).is_identity());
  EXPECT_TRUE(eval0(ba, d0("-", 2), s.r.g()).is_identity());
  EXPECT_THROW(eval0(ba, d0("(0|)", 1), s.r.g()), Error);
}

TEST(Eval2, SpecCases) {
  const Poset chain = load_poset("chain.poset");
  Small s(chain);
  const std::vector<ElemId> ba{*chain.find("b"), *chain.find("a")};
  const Descriptor0 rho = d0("(0,1|1);(1|)", 2);
  const GroupElement v = eval0(ba, rho, s.r.g());
  EXPECT_EQ(eval2(ba, Descriptor2{2, {rho}}, s.r.k()), s.r.k().from_g(v));
  EXPECT_EQ(eval2(ba, Descriptor2{2, {d0("-", 2), rho}}, s.r.k()), s.r.k().from_coset_of(v));
  EXPECT_THROW(eval2(ba, d2("-", 3), s.r.k()), Error);
}

TEST(Eval2, KeyMatchesElement) {
  for (const char* file : {"chain.poset", "w12.poset", "antichain3.poset"}) {
    const Poset p = load_poset(file);
    Small s(p);
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<ElemId> t(3);
      for (auto& e : t) e = static_cast<ElemId>(rng.below(p.size()));
      const QfType type = qf_type(t, p);
      const Descriptor2 d = random_descriptor2(type, rng, 3, 3);
      EXPECT_EQ(key_of(eval2(t, d, s.r.k()), s.r.g()), eval2_key(t, d, s.r.g())) << file << " " << render(d);
    }
  }
}

TEST(Types, SmallArities) {
  EXPECT_EQ(enumerate_qf_types(0).types.size(), 1u);
  EXPECT_EQ(enumerate_qf_types(1).types.size(), 1u);
  EXPECT_EQ(enumerate_qf_types(2).types.size(), 4u);
  EXPECT_THROW(enumerate_qf_types(5), Error);
}

TEST(Types, CountsMatchConsistentCodes) {
  for (std::size_t k : {3u, 4u}) {
    const TypeCatalog catalog = enumerate_qf_types(k);
    EXPECT_EQ(catalog.types.size(), consistent_code_count(k)) << k;
    for (const auto& r : catalog.types) {
      EXPECT_TRUE(r.type.consistent());
      EXPECT_EQ(qf_type(r.tuple, catalog.probes[r.probe]), r.type);
    }
  }
  EXPECT_EQ(consistent_code_count(3), 29u);
  EXPECT_EQ(consistent_code_count(4), 355u);
}

TEST(Types, NamedProbeFamily) {
  std::vector<Poset> probes{make_chain(3), make_antichain(3), make_wide_poset(1, 2)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) probes.push_back(random_poset(seed, 4, 0.5));
  const TypeCatalog catalog = enumerate_qf_types(3, probes);
  std::set<QfType> direct;
  for (const Poset& p : probes)
    for (ElemId x = 0; x < p.size(); ++x)
      for (ElemId y = 0; y < p.size(); ++y)
        for (ElemId z = 0; z < p.size(); ++z) direct.insert(type_of({x, y, z}, p));
  EXPECT_EQ(catalog.types.size(), direct.size());
  EXPECT_EQ(catalog.types.size(), 29u);
}

TEST(Types, StandardProbeCounts) {
  std::vector<std::size_t> sizes;
  for (const Poset& p : standard_probes(4)) {
    if (sizes.size() < p.size()) sizes.resize(p.size());
    ++sizes[p.size() - 1];
  }
  EXPECT_EQ(sizes, (std::vector<std::size_t>{1, 2, 5, 16}));
}

TEST(Instances, RealizeTheType) {
  const TypeCatalog catalog = enumerate_qf_types(3);
  for (const auto& r : catalog.types) {
    const auto instances = realizing_instances(r.type, 3, 5);
    ASSERT_EQ(instances.size(), 3u);
    for (const auto& inst : instances) EXPECT_EQ(qf_type(inst.tuple, inst.realization->poset()), r.type);
  }
  EXPECT_THROW(canonical_instance(QfType(2, {1, 0, 0, 1})), Error);
}

TEST(Equivalent, SpecCases) {
  const Poset chain = load_poset("chain.poset");
  const QfType gt = type_of({1, 0}, chain);
  const Descriptor0 rho = d0("(0,1|0);(0,1|1)", 2);
  for (auto level : {EquivLevel::Group, EquivLevel::Coset, EquivLevel::Twisted})
    EXPECT_TRUE(equivalent(rho, rho, gt, level));
  EXPECT_TRUE(equivalent(rho, d0("(0,1|1);(0,1|0)", 2), gt, EquivLevel::Group));
  EXPECT_TRUE(equivalent(d0("(0,1|0)", 2), d0("-", 2), gt, EquivLevel::Coset));
  EXPECT_FALSE(equivalent(d0("(0,1|0)", 2), d0("-", 2), gt, EquivLevel::Group));
}

TEST(Equivalent, NormalFormIsExplicitlyReduced) {
  const TypeCatalog catalog = enumerate_qf_types(3);
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const QfType& p = catalog.types[rng.below(catalog.types.size())].type;
    const Descriptor0 d = random_descriptor0(p, rng, 5, 2, 0.2);
    const Descriptor0 nf = explicit_normal_form(d, p);
    EXPECT_TRUE(explicitly_reduced(nf)) << render(nf);
    EXPECT_TRUE(in_lambda0(nf, p));
    EXPECT_TRUE(equivalent(d, nf, p, EquivLevel::Group)) << render(d);
    EXPECT_EQ(explicit_normal_form(nf, p), nf);
  }
}

TEST(Lambda, CosetPartsNeedMinimalSupport) {
  const Poset chain = load_poset("chain.poset");
  const QfType gt = type_of({1, 0}, chain), lt = type_of({0, 1}, chain);
  EXPECT_TRUE(in_lambda1(d0("(0,1|1)", 2), gt));
  EXPECT_TRUE(in_lambda1(d0("(1|)", 2), gt));
  // Below zero, so the coset is G^{<0} itself and the empty part names it.
  EXPECT_FALSE(in_lambda1(d0("(0,1|0)", 2), gt));
  EXPECT_FALSE(in_lambda1(d0("(0|);(0|)", 2), gt));
  EXPECT_FALSE(in_lambda1(d0("(0,1|1)", 2), lt));
  EXPECT_TRUE(in_lambda2(d2("(0,1|0)||(0,1|1)", 2), gt));
  EXPECT_FALSE(in_lambda2(d2("-||(0,1|0)", 2), gt));
}

TEST(Lambda, RandomAndReducedStayInside) {
  Rng rng(21);
  for (std::size_t k = 1; k <= 3; ++k)
    for (const auto& rt : enumerate_qf_types(k).types)
      for (int i = 0; i < 20; ++i) {
        const Descriptor2 d = random_descriptor2(rt.type, rng, 3, 3);
        ASSERT_TRUE(in_lambda2(d, rt.type)) << render(d);
        EXPECT_TRUE(in_lambda2(reduce(d, rt.type), rt.type)) << render(d);
      }
}

TEST(Reduce, SpecCases) {
  const Poset chain = load_poset("chain.poset");
  const QfType gt = type_of({1, 0}, chain), lt = type_of({0, 1}, chain);
  EXPECT_EQ(reduce(d2("(0,1|0);(0,1|0)", 2), gt), d2("-", 2));
  EXPECT_EQ(reduce(d2("(0,1|1)", 2), lt), d2("-", 2));
  EXPECT_TRUE(support(reduce(d2("(0,1|1)", 2), gt)).size() == 2);
  EXPECT_THROW(reduce(d2("(0,1|1)", 2), gt, 1), Error);
}

TEST(Reduce, IdempotentAndEquivalent) {
  Rng rng(7);
  for (std::size_t k : {1u, 2u, 3u}) {
    const TypeCatalog catalog = enumerate_qf_types(k);
    for (int trial = 0; trial < 300; ++trial) {
      const QfType& p = catalog.types[rng.below(catalog.types.size())].type;
      const Descriptor2 d = random_descriptor2(p, rng, 3, 3);
      const Descriptor2 r = reduce(d, p);
      EXPECT_EQ(reduce(r, p), r) << render(d);
      EXPECT_TRUE(is_reduced(r, p));
      EXPECT_TRUE(equivalent(d, r, p)) << render(d);
      const auto s = support(r), full = support(d);
      EXPECT_TRUE(std::includes(full.begin(), full.end(), s.begin(), s.end()));
    }
  }
}

TEST(Compose, MatchesGroupProduct) {
  const Poset p = load_poset("w12.poset");
  Small s(p);
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ElemId> t(3);
    for (auto& e : t) e = static_cast<ElemId>(rng.below(p.size()));
    const QfType type = qf_type(t, p);
    const Descriptor2 a = random_descriptor2(type, rng, 3, 3), b = random_descriptor2(type, rng, 3, 3);
    const KElement x = eval2(t, a, s.r.k()), y = eval2(t, b, s.r.k());
    EXPECT_EQ(eval2(t, compose(a, b), s.r.k()), s.r.k().multiply(x, y));
    EXPECT_EQ(s.r.k().multiply(eval2(t, inverse(a), s.r.k()), x), s.r.k().identity());
  }
}

TEST(QMap, ConstantEmptyIsIdentity) {
  const TypeCatalog catalog = enumerate_qf_types(2);
  const QMap q = make_qmap(catalog, [](const QfType& p) { return Descriptor2{p.k(), {Descriptor0{p.k(), {}}}}; });
  EXPECT_TRUE(q.disjoint);
  EXPECT_TRUE(q.reduced);
  const Poset chain = load_poset("chain.poset");
  Small s(chain);
  for (ElemId x = 0; x < 2; ++x)
    for (ElemId y = 0; y < 2; ++y) {
      const std::vector<ElemId> t{x, y};
      EXPECT_EQ(eval_qmap(t, q, s.r.k()), s.r.k().identity());
    }
}

TEST(QMap, DispatchesOnType) {
  const TypeCatalog catalog = enumerate_qf_types(2);
  const Poset chain = load_poset("chain.poset");
  Small s(chain);
  const QfType gt = type_of({1, 0}, chain), eq = type_of({0, 0}, chain);
  const QMap q = make_qmap(catalog, [&](const QfType& p) {
    return p == gt ? d2("(0,1|0)", 2) : p == eq ? d2("-||(0|)", 2) : d2("-", 2);
  });
  EXPECT_FALSE(q.disjoint);
  const std::vector<ElemId> ba{1, 0}, aa{0, 0};
  EXPECT_EQ(eval_qmap(ba, q, s.r.k()), eval2(ba, q.table.at(gt), s.r.k()));
  EXPECT_EQ(eval_qmap(aa, q, s.r.k()), eval2(aa, q.table.at(eq), s.r.k()));
  QMap partial = q;
  partial.table.erase(gt);
  EXPECT_THROW(eval_qmap(ba, partial, s.r.k()), Error);
}

TEST(QMap, ComposeAndInverse) {
  const TypeCatalog c1 = enumerate_qf_types(1), c2 = enumerate_qf_types(2);
  const QMap q1 = make_qmap(c1, [](const QfType&) { return d2("(0|)", 1); });
  const QMap q2 = make_qmap(c1, [](const QfType&) { return d2("-||(0|)", 1); });
  const QMap q = compose(q1, q2, c2);
  EXPECT_EQ(q.table.size(), 4u);
  const Poset p = load_poset("w12.poset");
  Small s(p);
  for (ElemId x = 0; x < p.size(); ++x)
    for (ElemId y = 0; y < p.size(); ++y) {
      const std::vector<ElemId> t{x, y}, tx{x}, ty{y};
      const KElement want = s.r.k().multiply(eval_qmap(tx, q1, s.r.k()), eval_qmap(ty, q2, s.r.k()));
      EXPECT_EQ(eval_qmap(t, q, s.r.k()), want);
      EXPECT_EQ(s.r.k().multiply(eval_qmap(t, inverse(q), s.r.k()), want), s.r.k().identity());
    }
}

}  // namespace
}  // namespace nortower
