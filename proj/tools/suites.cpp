#include "suites.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nortower/descriptors.hpp"
#include "nortower/error.hpp"
#include "nortower/group_g.hpp"
#include "nortower/normalizer.hpp"
#include "nortower/powis.hpp"
#include "nortower/random.hpp"

namespace nortower::cli {
namespace {

const std::set<std::string> kSuites{"tables", "normalizer", "ktower", "equivalence", "support", "powis", "limit", "exlimit"};

std::string first_word(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string w;
    if (words >> w && w[0] != '#') return w;
  }
  return {};
}

Poset load_poset_text(const std::string& text) { return validate_poset(parse_poset(text)); }

// A powis file, or a function family built into one.
BuiltSystem load_system(const std::string& text) {
  if (first_word(text) == "funcs") return build_from_functions(parse_funcs(text));
  Powis s = load_powis(text);
  if (!s.limit()) throw Error(ErrorKind::InvalidArgument, "system declares no limit node");
  const NodeId limit = *s.limit();
  return {std::move(s), limit, {}};
}

void suite_tables(const std::string& text, const SuiteOptions& o, Report& r) {
  const UniversePtr u = enumerate_gens(load_poset_text(text), o.cap);
  const GroupG g(u, o.cap);
  const LevelOracle oracle(u);
  const Mask full = (Mask{1} << u->size()) - 1;
  r.set("gens", u->size());
  bool tables = true;
  std::size_t products = 0;
  if (u->size() <= 12) {
    for (Mask a = 0; a <= full && tables; ++a)
      for (Mask b = 0; b <= full; ++b, ++products) {
        const auto via = oracle.multiply(oracle.from_element(g.from_mask(a)), oracle.from_element(g.from_mask(b)));
        if (oracle.to_word(via) != g.from_mask(g.multiply_masks(a, b)).word()) {
          tables = false;
          break;
        }
      }
  } else {
    Rng rng(o.seed);
    for (std::size_t i = 0; i < o.samples * 100 && tables; ++i, ++products) {
      const Mask a = rng.next() & full, b = rng.next() & full;
      const auto via = oracle.multiply(oracle.from_element(g.from_mask(a)), oracle.from_element(g.from_mask(b)));
      tables = oracle.to_word(via) == g.from_mask(g.multiply_masks(a, b)).word();
    }
  }
  r.set("products", products);
  r.check("tables", tables, "rewriting and the level oracle give the same product");

  Rng rng(o.seed + 1);
  bool shorter = true;
  for (std::size_t i = 0; i < o.samples * 10 && shorter; ++i) {
    std::vector<GenId> word(rng.below(2 * u->size() + 1));
    for (auto& x : word) x = static_cast<GenId>(rng.below(u->size()));
    shorter = g.from_word(word).length() <= word.size();
  }
  r.check("length", shorter, "a normal form is never longer than its input word");

  bool involution = true;
  for (GenId x = 0; x < u->size(); ++x)
    for (GenId y = 0; y < u->size(); ++y) {
      const GenId y2 = u->conj_action(x, y);
      involution = involution && u->conj_action(x, y2) == y && u->n(y2) == u->n(y);
    }
  r.check("involution", involution, "conjugation by a generator is an involution fixing n");
}

void suite_normalizer(const std::string& text, const std::string& file, const SuiteOptions& o, Report& r) {
  const LevelNormalizerReport m = check_level_normalizers(load_poset_text(text), 2, o.cap);
  for (const auto& row : m.rows) {
    const std::string a = "alpha" + std::to_string(row.alpha);
    r.set(a + ".level", row.level_size);
    r.set(a + ".next", row.next_level_size);
    r.set(a + ".normalizer", row.normalizer_size);
    r.set(a + ".equal", row.equal);
  }
  r.check("superset", m.superset_everywhere(), "the next level normalizes the current one");
  r.check("top", m.top_stable, "the whole group is its own normalizer");

  if (o.fixtures.empty()) return;
  std::ifstream in(std::filesystem::path(o.fixtures) / "normalizer_verdicts.txt");
  const std::string base = std::filesystem::path(file).filename().string();
  std::string line;
  std::size_t compared = 0;
  bool same = true;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string name;
    LevelNormalizerRow want;
    int equal = 0;
    if (!(row >> name >> want.alpha >> want.level_size >> want.next_level_size >> want.normalizer_size >> equal) ||
        name != base)
      continue;
    ++compared;
    const auto it = std::find_if(m.rows.begin(), m.rows.end(), [&](const LevelNormalizerRow& x) { return x.alpha == want.alpha; });
    same = same && it != m.rows.end() && it->level_size == want.level_size &&
           it->next_level_size == want.next_level_size && it->normalizer_size == want.normalizer_size &&
           it->equal == (equal != 0);
  }
  r.set("frozen_rows", compared);
  if (compared > 0) r.check("frozen", same, "verdicts match the frozen brute-force run");
}

void suite_ktower(const std::string& text, const SuiteOptions& o, Report& r) {
  const Poset p = load_poset_text(text);
  const KTowerReport k = tower_k_fast(p, o.cap, 8, o.seed);
  r.set("tau", k.tower.length);
  if (k.tower.expected) r.set("expected", *k.tower.expected);
  r.set("commutation_checks", k.commutation_checks);
  r.check("first_normalizer", k.commutation_mismatches == 0,
          "(g,h) commutes with h_star exactly when g lies below zero");

  const GroupG g(enumerate_gens(p, o.cap), o.cap);
  const GTable table(g);
  Subgroup level = table.level(0);
  bool preimages = true;
  for (std::size_t i = 1; i < k.g_parts.size(); ++i) {
    preimages = preimages && level.member == k.g_parts[i];
    level = normalizer(table, level);
  }
  r.check("preimages", preimages, "each K level is the preimage of the matching G level");
}

// Types realized by tuples of p with arity 1..3, each with its tuples.
std::map<QfType, std::vector<std::vector<ElemId>>> realized_tuples(const Poset& p, std::size_t k) {
  std::map<QfType, std::vector<std::vector<ElemId>>> out;
  const std::size_t n = p.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) total *= n;
  std::vector<ElemId> t(k);
  for (std::size_t c = 0; c < total; ++c) {
    for (std::size_t i = 0, x = c; i < k; ++i, x /= n) t[i] = static_cast<ElemId>(x % n);
    out[qf_type(t, p)].push_back(t);
  }
  return out;
}

void suite_equivalence(const std::string& text, const SuiteOptions& o, Report& r) {
  const Poset p = load_poset_text(text);
  std::vector<QfType> types;
  for (std::size_t k = 1; k <= 3; ++k)
    for (const auto& [type, tuples] : realized_tuples(p, k)) types.push_back(type);
  Rng rng(o.seed);
  std::size_t agree = 0, equivalent = 0;
  for (std::size_t i = 0; i < o.samples; ++i) {
    const QfType& type = types[rng.below(types.size())];
    const Descriptor2 a = random_descriptor2(type, rng, 3, 3);
    const Descriptor2 b = rng.chance(0.5) ? reduce(a, type) : random_descriptor2(type, rng, 3, 3);
    const auto v = equivalence_verdicts(a, b, type, realizing_instances(type, 3, rng.next()));
    agree += std::all_of(v.begin(), v.end(), [&](bool x) { return x == v[0]; });
    equivalent += v[0];
  }
  r.set("queries", o.samples);
  r.set("equivalent", equivalent);
  r.check("instances_agree", agree == o.samples, "an equivalence verdict does not depend on the instance");
}

void suite_support(const std::string& text, const SuiteOptions& o, Report& r) {
  const Poset p = load_poset_text(text);
  const Realization real(p, Realization::kDefaultCap);
  Rng rng(o.seed);
  std::size_t pairs = 0, violations = 0, descriptors = 0;
  for (std::size_t k = 1; k <= 3; ++k)
    for (const auto& [type, group] : realized_tuples(p, k))
      for (int draw = 0; draw < 4; ++draw) {
        const Descriptor2 d = reduce(random_descriptor2(type, rng, 3, 3), type);
        ++descriptors;
        const std::set<Index> supp = support(d);
        std::map<KKey, std::vector<std::size_t>> classes;
        for (std::size_t i = 0; i < group.size(); ++i) classes[eval2_key(group[i], d, real.g())].push_back(i);
        for (const auto& [key, members] : classes)
          for (std::size_t a : members)
            for (std::size_t b : members) {
              std::multiset<ElemId> ra, rb;
              for (Index i : supp) {
                ra.insert(group[a][i]);
                rb.insert(group[b][i]);
              }
              violations += ra != rb;
              ++pairs;
            }
      }
  r.set("descriptors", descriptors);
  r.set("pairs", pairs);
  r.set("violations", violations);
  r.check("support_permutation", violations == 0,
          "equal values of a reduced descriptor force the same support entries up to order");
}

void suite_powis(const std::string& text, const SuiteOptions& o, Report& r) {
  const Powis s = load_powis(text, false);
  r.set("nodes", s.size());
  r.set("nice", s.nice());
  if (const auto bad = find_incoherence(s)) {
    r.set("witness", bad->detail);
    r.check("coherent", false, "projections compose along every chain u <= v <= w");
    return;
  }
  r.check("coherent", true, "projections compose along every chain u <= v <= w");
  const CompatReport c = check_delta_compat(s, o.samples, o.seed);
  r.set("compat.points", c.points);
  r.set("compat.undefined_lifts", c.undefined_lifts);
  if (!c.ok()) r.set("compat.witness", c.witnesses.front());
  r.check("compat", c.ok(), "a lifted permutation restricts to the permutation below");
  // Products of factors defined at different nodes have no single encoding
  // once a projection is partial, so closure is claimed for nice systems only.
  if (!s.nice()) {
    r.set("closure", "skipped_partial");
    return;
  }
  bool closure = true;
  for (NodeId u = 0; u < s.size(); ++u) {
    const ClosureReport cl = check_F_closure(s, u, 100000, o.seed + u);
    closure = closure && cl.ok();
    if (!cl.ok()) r.set("closure.witness", cl.failures.front());
  }
  r.check("closure", closure, "identity, products and inverses act as their encodings");
}

void suite_limit(const std::string& text, Report& r) {
  const BuiltSystem b = load_system(text);
  const LimitReport l = check_limit(b.system, b.limit);
  r.set("limit", b.system.name(b.limit));
  r.set("threads", l.threads);
  if (l.max_u_st) r.set("max_u_st", b.system.name(*l.max_u_st));
  for (const auto& c : l.clauses) {
    const std::string name = std::string("clause_") + c.clause;
    if (!c.holds) r.set(name + ".witness", c.witness);
    r.check(name, c.holds, "limit clause " + std::string(1, c.clause) + " on the system below the limit node");
  }
}

void suite_exlimit(const std::string& text, const SuiteOptions& o, Report& r) {
  const BuiltSystem b = load_system(text);
  const ExLimitReport e = check_existential_limit(b.system, b.limit, 1, 1, o.samples * 1000);
  const char* verdict = e.verdict == ExVerdict::Satisfied                 ? "satisfied"
                        : e.verdict == ExVerdict::CounterexampleCandidate ? "counterexample"
                                                                          : "budget";
  r.set("verdict", verdict);
  r.set("instances", e.instances);
  if (e.from) r.set("witness.from", b.system.name(*e.from));
  if (!e.detail.empty()) r.set("detail", e.detail);
  r.check("existential", e.verdict == ExVerdict::Satisfied,
          "every assumption instance at k1 = k2 = 1 has a witness from some node on");
}

}  // namespace

bool known_suite(const std::string& name) { return kSuites.contains(name); }

void run_suite(const std::string& name, const std::string& text, const std::string& file,
               const SuiteOptions& options, Report& report) {
  report.set("suite", name);
  if (name == "tables") suite_tables(text, options, report);
  else if (name == "normalizer") suite_normalizer(text, file, options, report);
  else if (name == "ktower") suite_ktower(text, options, report);
  else if (name == "equivalence") suite_equivalence(text, options, report);
  else if (name == "support") suite_support(text, options, report);
  else if (name == "powis") suite_powis(text, options, report);
  else if (name == "limit") suite_limit(text, report);
  else if (name == "exlimit") suite_exlimit(text, options, report);
  else throw Error(ErrorKind::InvalidArgument, "unknown suite " + name);
}

}  // namespace nortower::cli
