// Runs every acceptance criterion once and prints one PASS/FAIL line each.
// Exits 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "nortower/descriptors.hpp"
#include "nortower/error.hpp"
#include "nortower/group_g.hpp"
#include "nortower/group_k.hpp"
#include "nortower/normalizer.hpp"
#include "nortower/powis.hpp"
#include "nortower/random.hpp"

namespace nortower {
namespace {

using testing::fixture_path;
using testing::load_poset;
using testing::read_file;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

// Table fixtures small enough for full multiplication tables.
std::vector<testing::NamedPoset> small_fixtures() {
  std::vector<testing::NamedPoset> out;
  for (auto& f : testing::table_fixtures())
    if (count_gens(f.poset) <= 12) out.push_back(std::move(f));
  return out;
}

Outcome normal_form_tables() {
  std::size_t products = 0;
  for (const auto& [name, p] : small_fixtures()) {
    const UniversePtr u = enumerate_gens(p);
    const GroupG g(u);
    const LevelOracle oracle(u);
    const Mask order = Mask{1} << u->size();
    std::vector<OracleElement> lifted;
    lifted.reserve(order);
    for (Mask m = 0; m < order; ++m) lifted.push_back(oracle.from_element(g.from_mask(m)));
    for (Mask a = 0; a < order; ++a)
      for (Mask b = 0; b < order; ++b) {
        const std::vector<GenId> word = oracle.to_word(oracle.multiply(lifted[a], lifted[b]));
        if (g.from_mask(g.multiply_masks(a, b)).word() != word)
          return fail(name + ": tables differ at " + std::to_string(a) + "*" + std::to_string(b));
        ++products;
      }
  }
  return {true, "products=" + std::to_string(products)};
}

Outcome length_bound() {
  std::size_t checked = 0;
  for (const auto& [name, p] : testing::table_fixtures()) {
    const GroupG g(enumerate_gens(p));
    const std::size_t n = g.universe().size();
    Rng rng(1000 + checked);
    for (int i = 0; i < 100000; ++i) {
      std::vector<GenId> word(rng.below(2 * n + 1));
      for (auto& x : word) x = static_cast<GenId>(rng.below(n));
      const std::size_t cut = word.empty() ? 0 : rng.below(word.size() + 1);
      const GroupElement a = g.from_word(std::span(word).first(cut));
      const GroupElement b = g.from_word(std::span(word).subspan(cut));
      const GroupElement ab = g.multiply(a, b);
      if (g.from_word(word).length() > word.size() || ab.length() > a.length() + b.length())
        return fail(name + ": word lengthened");
      ++checked;
    }
  }
  return {true, "products=" + std::to_string(checked)};
}

Outcome involution_levels() {
  std::size_t pairs = 0;
  for (const auto& [name, p] : testing::table_fixtures()) {
    const UniversePtr u = enumerate_gens(p);
    for (GenId x = 0; x < u->size(); ++x)
      for (GenId y = 0; y < u->size(); ++y) {
        const GenId y2 = u->conj_action(x, y);
        if (u->conj_action(x, y2) != y || u->n(y2) != u->n(y)) return fail(name + ": " + u->render(y));
        ++pairs;
      }
  }
  return {true, "pairs=" + std::to_string(pairs)};
}

Outcome g_normalizer() {
  std::size_t rows = 0;
  for (const auto& [name, p] : testing::table_fixtures()) {
    const LevelNormalizerReport r = check_level_normalizers(p, 2);
    if (!r.superset_everywhere()) return fail(name + ": next level not inside the normalizer");
    rows += r.rows.size();
  }
  std::ifstream in(fixture_path("normalizer_verdicts.txt"));
  std::map<std::string, LevelNormalizerReport> cache;
  std::string line;
  std::size_t frozen = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string file;
    LevelNormalizerRow want;
    int equal = 0;
    row >> file >> want.alpha >> want.level_size >> want.next_level_size >> want.normalizer_size >> equal;
    if (!cache.contains(file)) cache.emplace(file, check_level_normalizers(load_poset(file), 2));
    const auto& got = cache.at(file).rows;
    if (want.alpha < 0 || static_cast<std::size_t>(want.alpha) >= got.size()) return fail(file + ": missing row");
    const LevelNormalizerRow& g = got[want.alpha];
    if (g.level_size != want.level_size || g.next_level_size != want.next_level_size ||
        g.normalizer_size != want.normalizer_size || g.equal != (equal != 0))
      return fail(file + ": alpha " + std::to_string(want.alpha) + " differs from frozen row");
    ++frozen;
  }
  if (frozen != 6) return fail("expected 6 frozen rows, read " + std::to_string(frozen));
  return {true, "rows=" + std::to_string(rows) + " frozen=" + std::to_string(frozen)};
}

Outcome k_first_normalizer() {
  const KTowerReport r = tower_k_fast(load_poset("w13.poset"), GenUniverse::kDefaultCap, 8, 5);
  if (r.commutation_mismatches != 0)
    return fail("mismatches=" + std::to_string(r.commutation_mismatches));
  if (r.commutation_checks < 8 * 1024) return fail("too few checks");
  return {true, "checks=" + std::to_string(r.commutation_checks)};
}

Outcome tower_length() {
  const std::map<std::string, int> expected{{"chain.poset", 3}, {"antichain3.poset", 2}};
  std::string detail;
  for (const auto& [file, length] : expected) {
    const Poset p = load_poset(file);
    const KTowerReport fast = tower_k_fast(p);
    if (fast.tower.length != length)
      return fail(file + ": length " + std::to_string(fast.tower.length));
    // Each K level must be the preimage of the G-side level computed from scratch.
    const GroupG g(enumerate_gens(p));
    const GTable table(g);
    Subgroup level = table.level(0);
    for (std::size_t i = 1; i < fast.g_parts.size(); ++i) {
      if (level.member != fast.g_parts[i]) return fail(file + ": level " + std::to_string(i));
      level = normalizer(table, level);
    }
    detail += file + "=" + std::to_string(length) + " ";
  }
  // Full K table on the chain: every tower level is exactly a preimage.
  const Poset chain = load_poset("chain.poset");
  const GroupG g(enumerate_gens(chain));
  const GroupK k(g);
  const KTable table(k);
  const KTowerReport fast = tower_k_fast(chain);
  Subgroup level = table.h_subgroup();
  for (std::size_t i = 1; i < fast.g_parts.size(); ++i) {
    level = normalizer(table, level);
    for (std::uint64_t x = 0; x < table.order(); ++x)
      if ((level.member[x] != 0) != (fast.g_parts[i][table.g_part(x)] != 0))
        return fail("chain K table: level " + std::to_string(i));
  }
  return {true, detail + "ktable=chain"};
}

Outcome exists_forall() {
  Rng rng(77);
  std::size_t queries = 0, agreeing_true = 0;
  std::vector<TypeCatalog> catalogs;
  for (std::size_t k = 1; k <= 3; ++k) catalogs.push_back(enumerate_qf_types(k));
  while (queries < 1000) {
    const TypeCatalog& cat = catalogs[rng.below(catalogs.size())];
    const QfType& p = cat.types[rng.below(cat.types.size())].type;
    const auto instances = realizing_instances(p, 3, rng.next());
    std::vector<bool> verdicts;
    switch (rng.below(3)) {
      case 0: {
        const Descriptor0 a = random_descriptor0(p, rng, 4);
        const Descriptor0 b = rng.chance(0.5) ? explicit_normal_form(a, p) : random_descriptor0(p, rng, 4);
        verdicts = equivalence_verdicts(a, b, p, EquivLevel::Group, instances);
        break;
      }
      case 1: {
        const Descriptor0 a = random_descriptor0(p, rng, 4);
        const Descriptor0 b = random_descriptor0(p, rng, 4);
        verdicts = equivalence_verdicts(a, b, p, EquivLevel::Coset, instances);
        break;
      }
      default: {
        const Descriptor2 a = random_descriptor2(p, rng, 3, 3);
        const Descriptor2 b = rng.chance(0.5) ? reduce(a, p) : random_descriptor2(p, rng, 3, 3);
        verdicts = equivalence_verdicts(a, b, p, instances);
      }
    }
    if (verdicts.size() != 3) return fail("expected 3 instances");
    if (std::adjacent_find(verdicts.begin(), verdicts.end(), std::not_equal_to<>()) != verdicts.end())
      return fail("instances disagree on type " + p.render());
    agreeing_true += verdicts[0];
    ++queries;
  }
  return {true, "queries=" + std::to_string(queries) + " equivalent=" + std::to_string(agreeing_true)};
}

Outcome support_permutation() {
  std::vector<std::pair<std::string, Poset>> posets{
      {"chain", load_poset("chain.poset")}, {"antichain3", load_poset("antichain3.poset")},
      {"w12", load_poset("w12.poset")},     {"w13", load_poset("w13.poset")},
      {"w23", load_poset("w23.poset")},     {"chain4", make_chain(4)}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    posets.emplace_back("random" + std::to_string(seed), random_poset(seed, 6, 0.4));

  Rng rng(31);
  std::size_t pairs = 0, descriptors = 0;
  for (const auto& [name, p] : posets) {
    const Realization r(p);
    const std::size_t n = p.size();
    for (std::size_t k = 1; k <= 3; ++k) {
      std::map<QfType, std::vector<std::vector<ElemId>>> tuples;
      std::size_t total = 1;
      for (std::size_t i = 0; i < k; ++i) total *= n;
      std::vector<ElemId> t(k);
      for (std::size_t c = 0; c < total; ++c) {
        for (std::size_t i = 0, x = c; i < k; ++i, x /= n) t[i] = static_cast<ElemId>(x % n);
        tuples[qf_type(t, p)].push_back(t);
      }
      for (const auto& [type, group] : tuples)
        for (int draw = 0; draw < 6; ++draw) {
          const Descriptor2 d = reduce(random_descriptor2(type, rng, 3, 3), type);
          if (!in_lambda2(d, type)) return fail(name + ": reduce left lambda2: " + render(d));
          ++descriptors;
          const std::set<Index> supp = support(d);
          std::map<KKey, std::vector<std::size_t>> classes;
          for (std::size_t i = 0; i < group.size(); ++i) classes[eval2_key(group[i], d, r.g())].push_back(i);
          for (const auto& [key, members] : classes)
            for (std::size_t a : members)
              for (std::size_t b : members) {
                std::vector<ElemId> ra, rb;
                for (Index i : supp) {
                  ra.push_back(group[a][i]);
                  rb.push_back(group[b][i]);
                }
                std::sort(ra.begin(), ra.end());
                std::sort(rb.begin(), rb.end());
                if (ra != rb) return fail(name + ": " + type.render() + " " + render(d));
                ++pairs;
              }
        }
    }
  }
  return {true, "descriptors=" + std::to_string(descriptors) + " pairs=" + std::to_string(pairs)};
}

Outcome inverse_system() {
  std::string detail;
  for (const char* file : {"pair.powis", "diamond.powis"}) {
    const CompatReport r = check_delta_compat(load_powis(read_file(fixture_path(file))), 1000, 9);
    if (!r.ok()) return fail(std::string(file) + ": " + r.witnesses.front());
    detail += std::string(file) + " points=" + std::to_string(r.points) + " ";
  }
  try {
    load_powis(read_file(fixture_path("bad.powis")));
    return fail("bad.powis accepted");
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IncoherentProjection || e.detail().empty())
      return fail("bad.powis: wrong rejection");
  }
  return {true, detail + "bad.powis rejected"};
}

Outcome limit_construction() {
  const FunctionFamily f = parse_funcs(read_file(fixture_path("theta3.funcs")));
  const BuiltSystem b = build_from_functions(f);
  if (b.family.size() > 8) return fail("family too large");
  const LimitReport r = check_limit(b.system, b.limit);
  for (const auto& c : r.clauses)
    if (!c.holds) return fail(std::string("clause ") + c.clause + ": " + c.witness);
  if (!(load_powis(format_powis(b.system)) == b.system)) return fail("round trip changed the system");
  const ExLimitReport ex = check_existential_limit(b.system, b.limit, 1, 1, 1000000);
  if (ex.verdict != ExVerdict::Satisfied || ex.s.empty() || !ex.from)
    return fail("existential limit: " + ex.detail);
  return {true, "family=" + std::to_string(b.family.size()) + " threads=" + std::to_string(r.threads) +
                    " instances=" + std::to_string(ex.instances) + " from=" + b.system.name(*ex.from)};
}

}  // namespace
}  // namespace nortower

int main() {
  using namespace nortower;
  const std::vector<Criterion> criteria{
      {1, "normal-form tables", 10, normal_form_tables},
      {2, "rewriting length bound", 5, length_bound},
      {3, "involution and level laws", 1, involution_levels},
      {4, "G-side normalizer", 120, g_normalizer},
      {5, "K-side first normalizer", 30, k_first_normalizer},
      {6, "tower length", 60, tower_length},
      {7, "descriptor exists-forall", 30, exists_forall},
      {8, "support permutation", 120, support_permutation},
      {9, "inverse-system compatibility", 10, inverse_system},
      {10, "limit construction", 70, limit_construction},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = fail(std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.pass && seconds > c.limit_s) out = fail("over time limit " + std::to_string(c.limit_s) + " s");
    failed += !out.pass;
    std::printf("%s criterion %d %s (%.2f s): %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, seconds,
                out.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
