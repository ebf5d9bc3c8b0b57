#include "nortower/descriptors.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>

#include "nortower/error.hpp"
#include "text.hpp"

namespace nortower {

namespace {

void require_arity(std::size_t have, std::size_t want, const char* what) {
  if (have != want)
    throw Error(ErrorKind::ArityMismatch, std::string(what) + ": arity " + std::to_string(have) +
                                              " where " + std::to_string(want) + " is expected");
}

void require_realizable(const QfType& p) {
  if (!p.consistent()) throw Error(ErrorKind::UnrealizableType, "type " + p.render());
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

Index parse_index(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw Error(ErrorKind::ParseError, "bad index '" + s + "'");
  return static_cast<Index>(std::stoul(s));
}

// Least position of each element among `positions`.
std::map<ElemId, Index> least_positions(std::span<const ElemId> t, std::span<const Index> positions) {
  std::map<ElemId, Index> out;
  for (Index i : positions) out.emplace(t[i], i);
  return out;
}

Item item_for(const ChainGen& x, const std::map<ElemId, Index>& position) {
  Item item;
  for (ElemId e : x.tbar) item.lbar.push_back(position.at(e));
  item.eta = x.eta;
  return item;
}

bool letters_within(const GroupElement& g, const GenUniverse& u, const std::map<ElemId, Index>& position) {
  for (GenId x : g.word())
    for (ElemId e : u.gen(x).tbar)
      if (!position.contains(e)) return false;
  return true;
}

Poset poset_from_mask(std::size_t n, std::uint64_t mask,
                      const std::vector<std::pair<ElemId, ElemId>>& pairs) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (std::size_t b = 0; b < pairs.size(); ++b)
    if ((mask >> b) & 1) lt.push_back(pairs[b]);
  return make_poset(std::move(names), lt);
}

// Embeds `base` into a larger poset and permutes element ids; the order among
// the old elements is unchanged.
Instance extend(const Poset& base, std::span<const ElemId> tuple, Rng& rng, std::string label) {
  const std::size_t n = base.size();
  std::vector<std::string> names = base.names();
  std::vector<std::pair<ElemId, ElemId>> lt = base.lt_pairs();
  const auto above = static_cast<ElemId>(n), below = static_cast<ElemId>(n + 1);
  names.push_back("x_up");
  names.push_back("x_down");
  for (ElemId a = 0; a < n; ++a) {
    // `above` dominates a random down-set, `below` sits under a random up-set.
    if (rng.chance(0.5))
      for (ElemId b = 0; b <= a; ++b)
        if (b == a || base.less(b, a)) lt.emplace_back(b, above);
    if (rng.chance(0.5))
      for (ElemId b = 0; b < n; ++b)
        if (b == a || base.less(a, b)) lt.emplace_back(below, b);
  }
  std::sort(lt.begin(), lt.end());
  lt.erase(std::unique(lt.begin(), lt.end()), lt.end());
  const Poset wide = make_poset(names, lt);
  std::vector<ElemId> perm(wide.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::vector<ElemId> where(perm.size());
  for (ElemId i = 0; i < perm.size(); ++i) where[perm[i]] = i;
  Instance out;
  out.realization = std::make_shared<const Realization>(wide.induced(perm));
  for (ElemId e : tuple) out.tuple.push_back(where[e]);
  out.label = std::move(label);
  return out;
}

}  // namespace

void validate(const Descriptor0& d) {
  for (const Item& item : d.items) {
    if (item.lbar.empty()) throw Error(ErrorKind::InvalidArgument, "item without positions");
    if (item.eta.size() + 1 != item.lbar.size())
      throw Error(ErrorKind::InvalidArgument, "item needs one bit fewer than positions");
    for (Index i : item.lbar)
      if (i >= d.k)
        throw Error(ErrorKind::IndexOutOfRange,
                    "position " + std::to_string(i) + " with arity " + std::to_string(d.k));
    for (auto bit : item.eta)
      if (bit > 1) throw Error(ErrorKind::InvalidArgument, "bits are 0 or 1");
  }
}

void validate(const Descriptor2& d) {
  if (d.parts.empty()) throw Error(ErrorKind::InvalidArgument, "descriptor needs a first part");
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    require_arity(d.parts[i].k, d.k, "part");
    validate(d.parts[i]);
    if (i > 0 && d.parts[i].empty())
      throw Error(ErrorKind::InvalidArgument, "coset parts must be nonempty");
  }
}

std::string render(const Descriptor0& d) {
  if (d.items.empty()) return "-";
  std::string out;
  for (std::size_t j = 0; j < d.items.size(); ++j) {
    if (j) out += ';';
    out += '(';
    for (std::size_t i = 0; i < d.items[j].lbar.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(d.items[j].lbar[i]);
    }
    out += '|';
    for (auto bit : d.items[j].eta) out += static_cast<char>('0' + bit);
    out += ')';
  }
  return out;
}

std::string render(const Descriptor2& d) {
  std::string out;
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    if (i) out += "||";
    out += render(d.parts[i]);
  }
  return out;
}

Descriptor0 parse_descriptor0(std::string_view text, std::size_t k) {
  Descriptor0 d{k, {}};
  const std::string body = trim(text);
  if (body.empty() || body == "-") return d;
  for (const std::string& raw : detail::split(body, ';')) {
    const std::string s = trim(raw);
    const auto bar = s.find('|');
    if (s.size() < 3 || s.front() != '(' || s.back() != ')' || bar == std::string::npos)
      throw Error(ErrorKind::ParseError, "bad item '" + s + "'");
    Item item;
    for (const std::string& idx : detail::split(s.substr(1, bar - 1), ','))
      item.lbar.push_back(parse_index(trim(idx)));
    for (char c : s.substr(bar + 1, s.size() - bar - 2)) {
      if (c != '0' && c != '1') throw Error(ErrorKind::ParseError, "bad bits in '" + s + "'");
      item.eta.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    d.items.push_back(std::move(item));
  }
  validate(d);
  return d;
}

Descriptor2 parse_descriptor2(std::string_view text, std::size_t k) {
  Descriptor2 d{k, {}};
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find("||", start);
    d.parts.push_back(parse_descriptor0(text.substr(start, pos - start), k));
    if (pos == std::string_view::npos) break;
    start = pos + 2;
  }
  validate(d);
  return d;
}

std::set<Index> support(const Descriptor0& d) {
  std::set<Index> out;
  for (const Item& item : d.items) out.insert(item.lbar.begin(), item.lbar.end());
  return out;
}

std::set<Index> support(const Descriptor2& d) {
  std::set<Index> out;
  for (const auto& part : d.parts) {
    auto s = support(part);
    out.insert(s.begin(), s.end());
  }
  return out;
}

bool item_decreasing(const Item& item, const QfType& p) {
  for (std::size_t i = 0; i + 1 < item.lbar.size(); ++i)
    if (item.lbar[i] >= p.k() || item.lbar[i + 1] >= p.k() ||
        p.code(item.lbar[i], item.lbar[i + 1]) != 2)
      return false;
  return item.lbar.empty() || item.lbar[0] < p.k();
}

bool in_lambda0(const Descriptor0& d, const QfType& p) {
  return std::all_of(d.items.begin(), d.items.end(),
                     [&](const Item& item) { return item_decreasing(item, p); });
}

bool explicitly_reduced(const Descriptor0& d) {
  std::set<Item> seen;
  for (std::size_t j = 0; j < d.items.size(); ++j) {
    if (!seen.insert(d.items[j]).second) return false;
    if (j > 0 && d.items[j].n() > d.items[j - 1].n()) return false;
  }
  return true;
}

Realization::Realization(Poset p, std::size_t cap)
    : u_(enumerate_gens(p, cap)), g_(u_), k_(g_) {}

std::vector<Poset> standard_probes(std::size_t max_points) {
  if (max_points > 5) throw Error(ErrorKind::ArityTooLarge, "probes are limited to 5 points");
  std::vector<Poset> out;
  for (std::size_t n = 1; n <= max_points; ++n) {
    std::vector<std::pair<ElemId, ElemId>> pairs;
    for (ElemId a = 0; a < n; ++a)
      for (ElemId b = 0; b < n; ++b)
        if (a != b) pairs.emplace_back(a, b);
    auto bit = [&](ElemId a, ElemId b) {
      return static_cast<std::size_t>(a * (n - 1) + (b < a ? b : b - 1));
    };
    std::vector<ElemId> perm(n);
    std::set<std::uint64_t> seen;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
      auto rel = [&](ElemId a, ElemId b) { return a != b && ((mask >> bit(a, b)) & 1); };
      bool ok = true;
      for (ElemId a = 0; a < n && ok; ++a)
        for (ElemId b = 0; b < n && ok; ++b) {
          if (rel(a, b) && rel(b, a)) ok = false;
          for (ElemId c = 0; c < n && ok; ++c)
            if (rel(a, b) && rel(b, c) && !rel(a, c)) ok = false;
        }
      if (!ok) continue;
      std::iota(perm.begin(), perm.end(), 0);
      std::uint64_t canon = ~std::uint64_t{0};
      do {
        std::uint64_t image = 0;
        for (ElemId a = 0; a < n; ++a)
          for (ElemId b = 0; b < n; ++b)
            if (rel(a, b)) image |= std::uint64_t{1} << bit(perm[a], perm[b]);
        canon = std::min(canon, image);
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (seen.insert(canon).second) out.push_back(poset_from_mask(n, canon, pairs));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Poset& a, const Poset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return format_poset(a) < format_poset(b);
  });
  return out;
}

const RealizedType* TypeCatalog::find(const QfType& p) const {
  auto it = std::lower_bound(types.begin(), types.end(), p,
                             [](const RealizedType& r, const QfType& q) { return r.type < q; });
  return it != types.end() && it->type == p ? &*it : nullptr;
}

TypeCatalog enumerate_qf_types(std::size_t k, std::vector<Poset> probes) {
  if (k > 4) throw Error(ErrorKind::ArityTooLarge, "type enumeration is limited to k <= 4");
  std::stable_sort(probes.begin(), probes.end(), [](const Poset& a, const Poset& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return format_poset(a) < format_poset(b);
  });
  TypeCatalog catalog;
  catalog.k = k;
  std::map<QfType, RealizedType> found;
  for (std::size_t pi = 0; pi < probes.size(); ++pi) {
    const Poset& probe = probes[pi];
    std::vector<ElemId> tuple(k, 0);
    while (true) {
      QfType type = qf_type(tuple, probe);
      found.try_emplace(type, RealizedType{type, pi, tuple});
      std::size_t pos = k;
      while (pos > 0 && tuple[pos - 1] + 1 == probe.size()) tuple[--pos] = 0;
      if (pos == 0) break;
      ++tuple[pos - 1];
    }
  }
  for (auto& [type, realized] : found) catalog.types.push_back(std::move(realized));
  catalog.probes = std::move(probes);
  return catalog;
}

Instance canonical_instance(const QfType& p) {
  require_realizable(p);
  static std::mutex mutex;
  static std::map<QfType, Instance> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(p); it != cache.end()) return it->second;

  std::vector<ElemId> cls(p.k());
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < p.k(); ++i) {
    auto same = std::find_if(reps.begin(), reps.end(), [&](std::size_t r) { return p.code(r, i) == 1; });
    if (same == reps.end()) {
      cls[i] = static_cast<ElemId>(reps.size());
      reps.push_back(i);
    } else {
      cls[i] = static_cast<ElemId>(same - reps.begin());
    }
  }
  std::vector<std::string> names;
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (std::size_t a = 0; a < reps.size(); ++a) {
    names.push_back("c" + std::to_string(a));
    for (std::size_t b = 0; b < reps.size(); ++b)
      if (p.code(reps[a], reps[b]) == 0) lt.emplace_back(a, b);
  }
  if (names.empty()) names.push_back("c0");
  Instance inst{std::make_shared<const Realization>(make_poset(names, lt)), cls, "canonical"};
  cache.emplace(p, inst);
  return inst;
}

std::vector<Instance> realizing_instances(const QfType& p, std::size_t count, std::uint64_t seed) {
  std::vector<Instance> out;
  if (count == 0) return out;
  out.push_back(canonical_instance(p));
  const Poset& base = out[0].realization->poset();
  Rng rng(seed);
  for (std::size_t i = 1; i < count; ++i) {
    Rng child = rng.split();
    out.push_back(extend(base, out[0].tuple, child, "extension" + std::to_string(i)));
  }
  for (const Instance& inst : out)
    if (qf_type(inst.tuple, inst.realization->poset()) != p)
      throw Error(ErrorKind::InvariantViolation, "instance " + inst.label + " does not realize " + p.render());
  return out;
}

GroupElement eval0(std::span<const ElemId> t, const Descriptor0& d, const GroupG& g) {
  require_arity(t.size(), d.k, "tuple");
  validate(d);
  const GenUniverse& u = g.universe();
  const Poset& poset = u.poset();
  std::vector<GenId> word;
  for (const Item& item : d.items) {
    ChainGen x;
    for (Index i : item.lbar) x.tbar.push_back(t[i]);
    bool decreasing = true;
    for (std::size_t i = 0; i + 1 < x.tbar.size(); ++i)
      if (!poset.less(x.tbar[i + 1], x.tbar[i])) decreasing = false;
    // A non-decreasing selection contributes the identity.
    if (!decreasing) continue;
    x.eta = item.eta;
    auto id = u.find(x);
    if (!id) throw Error(ErrorKind::InvariantViolation, "chain missing from universe");
    word.push_back(*id);
  }
  return g.from_word(word);
}

KElement eval2(std::span<const ElemId> t, const Descriptor2& d, const GroupK& k) {
  validate(d);
  require_arity(t.size(), d.k, "tuple");
  const GroupG& g = k.g_group();
  KElement out = k.from_g(eval0(t, d.parts[0], g));
  for (std::size_t i = 1; i < d.parts.size(); ++i)
    out = k.multiply(out, k.from_coset_of(eval0(t, d.parts[i], g)));
  return out;
}

KKey eval2_key(std::span<const ElemId> t, const Descriptor2& d, const GroupG& g) {
  validate(d);
  require_arity(t.size(), d.k, "tuple");
  KKey key{eval0(t, d.parts[0], g), {}};
  // Right factors (e, {c}) toggle c in the coset set.
  std::set<GroupElement> cosets;
  for (std::size_t i = 1; i < d.parts.size(); ++i) {
    GroupElement c = g.coset_key(eval0(t, d.parts[i], g));
    if (!cosets.erase(c)) cosets.insert(std::move(c));
  }
  key.cosets.assign(cosets.begin(), cosets.end());
  return key;
}

KKey key_of(const KElement& x, const GroupG& g) {
  KKey key{x.g, {}};
  for (const Coset& c : x.h.cosets()) key.cosets.push_back(g.coset_key(c.rep));
  std::sort(key.cosets.begin(), key.cosets.end());
  return key;
}

std::vector<bool> equivalence_verdicts(const Descriptor0& a, const Descriptor0& b, const QfType& p,
                                       EquivLevel level, const std::vector<Instance>& instances) {
  require_realizable(p);
  require_arity(a.k, p.k(), "descriptor");
  require_arity(b.k, p.k(), "descriptor");
  if (level == EquivLevel::Twisted)
    return equivalence_verdicts(Descriptor2{a.k, {a}}, Descriptor2{b.k, {b}}, p, instances);
  std::vector<bool> out;
  for (const Instance& inst : instances) {
    const GroupG& g = inst.realization->g();
    const GroupElement x = eval0(inst.tuple, a, g), y = eval0(inst.tuple, b, g);
    out.push_back(level == EquivLevel::Group ? x == y : g.same_coset(x, y));
  }
  return out;
}

std::vector<bool> equivalence_verdicts(const Descriptor2& a, const Descriptor2& b, const QfType& p,
                                       const std::vector<Instance>& instances) {
  require_realizable(p);
  require_arity(a.k, p.k(), "descriptor");
  require_arity(b.k, p.k(), "descriptor");
  std::vector<bool> out;
  for (const Instance& inst : instances) {
    const GroupG& g = inst.realization->g();
    out.push_back(eval2_key(inst.tuple, a, g) == eval2_key(inst.tuple, b, g));
  }
  return out;
}

namespace {

bool agreed(const std::vector<bool>& verdicts, const QfType& p) {
  if (std::adjacent_find(verdicts.begin(), verdicts.end(), std::not_equal_to<>()) != verdicts.end())
    throw Error(ErrorKind::InvariantViolation, "instances of " + p.render() + " disagree");
  return verdicts.front();
}

}  // namespace

bool equivalent(const Descriptor0& a, const Descriptor0& b, const QfType& p, EquivLevel level) {
  return agreed(equivalence_verdicts(a, b, p, level, realizing_instances(p, 2)), p);
}

bool equivalent(const Descriptor2& a, const Descriptor2& b, const QfType& p) {
  return agreed(equivalence_verdicts(a, b, p, realizing_instances(p, 2)), p);
}

bool in_lambda1(const Descriptor0& d, const QfType& p) {
  require_arity(d.k, p.k(), "descriptor");
  validate(d);
  if (!in_lambda0(d, p)) return false;
  const Instance inst = canonical_instance(p);
  const GroupG& g = inst.realization->g();
  const GroupElement key = g.coset_key(eval0(inst.tuple, d, g));
  const std::set<Index> supp_set = support(d);
  const std::vector<Index> supp(supp_set.begin(), supp_set.end());
  // Any strict subset naming every letter of the key yields a smaller part.
  for (std::uint64_t mask = 0; mask + 1 < (std::uint64_t{1} << supp.size()); ++mask) {
    std::vector<Index> subset;
    for (std::size_t i = 0; i < supp.size(); ++i)
      if (mask >> i & 1) subset.push_back(supp[i]);
    if (letters_within(key, g.universe(), least_positions(inst.tuple, subset))) return false;
  }
  return true;
}

bool in_lambda2(const Descriptor2& d, const QfType& p) {
  if (d.parts.empty() || !in_lambda0(d.parts[0], p)) return false;
  for (std::size_t i = 1; i < d.parts.size(); ++i)
    if (d.parts[i].empty() || !in_lambda1(d.parts[i], p)) return false;
  return true;
}

Descriptor0 explicit_normal_form(const Descriptor0& d, const QfType& p) {
  require_arity(d.k, p.k(), "descriptor");
  const Instance inst = canonical_instance(p);
  const GroupG& g = inst.realization->g();
  std::vector<Index> all(p.k());
  std::iota(all.begin(), all.end(), 0);
  const auto position = least_positions(inst.tuple, all);
  Descriptor0 out{d.k, {}};
  const GroupElement value = eval0(inst.tuple, d, g);
  for (GenId x : value.word())
    out.items.push_back(item_for(g.universe().gen(x), position));
  return out;
}

ReduceResult reduce_with_stats(const Descriptor2& d, const QfType& p, std::size_t budget) {
  validate(d);
  require_arity(d.k, p.k(), "descriptor");
  const Instance inst = canonical_instance(p);
  const GroupG& g = inst.realization->g();
  const GenUniverse& u = g.universe();
  const KKey target = eval2_key(inst.tuple, d, g);
  const std::set<Index> supp_set = support(d);
  const std::vector<Index> supp(supp_set.begin(), supp_set.end());

  ReduceResult result;
  for (std::size_t size = 0; size <= supp.size(); ++size) {
    std::vector<bool> pick(supp.size(), false);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
    do {
      if (++result.candidates > budget)
        throw Error(ErrorKind::SearchBudgetExceeded,
                    "budget " + std::to_string(budget) + " exhausted; best so far " + render(d));
      std::vector<Index> subset;
      for (std::size_t i = 0; i < supp.size(); ++i)
        if (pick[i]) subset.push_back(supp[i]);
      const auto position = least_positions(inst.tuple, subset);
      if (!letters_within(target.g, u, position)) continue;
      bool ok = true;
      for (const auto& c : target.cosets) ok = ok && letters_within(c, u, position);
      // The identity coset is named by a nonempty word with value e.
      const bool needs_unit = !target.cosets.empty() && target.cosets.front().is_identity();
      if (!ok || (needs_unit && subset.empty())) continue;

      Descriptor2 out{d.k, {Descriptor0{d.k, {}}}};
      for (GenId x : target.g.word()) out.parts[0].items.push_back(item_for(u.gen(x), position));
      for (const auto& c : target.cosets) {
        Descriptor0 part{d.k, {}};
        if (c.is_identity()) part.items.assign(2, Item{{subset.front()}, {}});
        for (GenId x : c.word()) part.items.push_back(item_for(u.gen(x), position));
        out.parts.push_back(std::move(part));
      }
      result.reduced = std::move(out);
      return result;
    } while (std::prev_permutation(pick.begin(), pick.end()));
  }
  throw Error(ErrorKind::InvariantViolation, "no candidate reproduces " + render(d));
}

bool is_reduced(const Descriptor2& d, const QfType& p) {
  return support(reduce(d, p)).size() == support(d).size();
}

Descriptor2 compose(const Descriptor2& first, const Descriptor2& second) {
  validate(first);
  validate(second);
  require_arity(second.k, first.k, "composed descriptor");
  const auto& a0 = first.parts[0].items;
  const auto& b0 = second.parts[0].items;
  std::vector<Item> b0_rev(b0.rbegin(), b0.rend());
  Descriptor2 out{first.k, {Descriptor0{first.k, a0}}};
  out.parts[0].items.insert(out.parts[0].items.end(), b0.begin(), b0.end());
  // (a, ha)(b, hb) = (ab, b^-1 ha + hb); b^-1 is b's word reversed.
  for (std::size_t i = 1; i < first.parts.size(); ++i) {
    Descriptor0 part{first.k, b0_rev};
    part.items.insert(part.items.end(), first.parts[i].items.begin(), first.parts[i].items.end());
    out.parts.push_back(std::move(part));
  }
  for (std::size_t j = 1; j < second.parts.size(); ++j) out.parts.push_back(second.parts[j]);
  return out;
}

Descriptor2 inverse(const Descriptor2& d) {
  validate(d);
  const auto& a0 = d.parts[0].items;
  // (g, h)^-1 = (g^-1, g h).
  Descriptor2 out{d.k, {Descriptor0{d.k, {a0.rbegin(), a0.rend()}}}};
  for (std::size_t i = 1; i < d.parts.size(); ++i) {
    Descriptor0 part{d.k, a0};
    part.items.insert(part.items.end(), d.parts[i].items.begin(), d.parts[i].items.end());
    out.parts.push_back(std::move(part));
  }
  return out;
}

Descriptor2 shift(const Descriptor2& d, std::size_t offset, std::size_t k) {
  Descriptor2 out = d;
  out.k = k;
  for (auto& part : out.parts) {
    part.k = k;
    for (auto& item : part.items)
      for (auto& i : item.lbar) i += static_cast<Index>(offset);
  }
  validate(out);
  return out;
}

void refresh_flags(QMap& q) {
  q.disjoint = true;
  std::set<Index> used;
  for (const auto& [type, d] : q.table)
    for (Index i : support(d))
      if (!used.insert(i).second) q.disjoint = false;
  q.reduced = std::all_of(q.table.begin(), q.table.end(),
                          [](const auto& entry) { return is_reduced(entry.second, entry.first); });
}

QMap make_qmap(const TypeCatalog& catalog, const std::function<Descriptor2(const QfType&)>& fn) {
  QMap q;
  q.k = catalog.k;
  for (const auto& r : catalog.types) {
    Descriptor2 d = fn(r.type);
    require_arity(d.k, q.k, "table entry");
    validate(d);
    q.table.emplace(r.type, std::move(d));
  }
  refresh_flags(q);
  return q;
}

namespace {

const Descriptor2& lookup(const QMap& q, const QfType& p) {
  auto it = q.table.find(p);
  if (it == q.table.end())
    throw Error(ErrorKind::TypeNotRealizedInTable, "no entry for type " + p.render());
  return it->second;
}

}  // namespace

KElement eval_qmap(std::span<const ElemId> t, const QMap& q, const GroupK& k) {
  require_arity(t.size(), q.k, "tuple");
  return eval2(t, lookup(q, qf_type(t, k.g_group().universe().poset())), k);
}

KKey eval_qmap_key(std::span<const ElemId> t, const QMap& q, const GroupG& g) {
  require_arity(t.size(), q.k, "tuple");
  return eval2_key(t, lookup(q, qf_type(t, g.universe().poset())), g);
}

QMap compose(const QMap& q1, const QMap& q2, const TypeCatalog& catalog) {
  require_arity(catalog.k, q1.k + q2.k, "catalog");
  std::vector<std::size_t> first(q1.k), second(q2.k);
  std::iota(first.begin(), first.end(), 0);
  std::iota(second.begin(), second.end(), q1.k);
  QMap out;
  out.k = catalog.k;
  for (const auto& r : catalog.types) {
    const Descriptor2& a = lookup(q1, r.type.restrict(first));
    const Descriptor2& b = lookup(q2, r.type.restrict(second));
    out.table.emplace(r.type, compose(shift(a, 0, out.k), shift(b, q1.k, out.k)));
  }
  refresh_flags(out);
  return out;
}

QMap inverse(const QMap& q) {
  QMap out;
  out.k = q.k;
  for (const auto& [type, d] : q.table) out.table.emplace(type, inverse(d));
  refresh_flags(out);
  return out;
}

Item random_item(const QfType& p, Rng& rng, std::size_t max_n, double fallback) {
  if (p.k() == 0) throw Error(ErrorKind::InvalidArgument, "no positions for an item");
  Item item;
  const auto start = static_cast<Index>(rng.below(p.k()));
  if (fallback > 0 && rng.chance(fallback)) {
    item.lbar = {start, start};
    item.eta = {static_cast<std::uint8_t>(rng.below(2))};
    return item;
  }
  item.lbar = {start};
  const std::size_t target = rng.below(max_n + 1);
  while (item.lbar.size() <= target) {
    std::vector<Index> lower;
    for (Index j = 0; j < p.k(); ++j)
      if (p.code(item.lbar.back(), j) == 2) lower.push_back(j);
    if (lower.empty()) break;
    item.lbar.push_back(lower[rng.below(lower.size())]);
  }
  for (std::size_t i = 1; i < item.lbar.size(); ++i)
    item.eta.push_back(static_cast<std::uint8_t>(rng.below(2)));
  return item;
}

Descriptor0 random_descriptor0(const QfType& p, Rng& rng, std::size_t max_items, std::size_t max_n,
                               double fallback) {
  Descriptor0 d{p.k(), {}};
  if (p.k() == 0) return d;
  const std::size_t count = rng.below(max_items + 1);
  for (std::size_t j = 0; j < count; ++j) d.items.push_back(random_item(p, rng, max_n, fallback));
  return d;
}

Descriptor2 random_descriptor2(const QfType& p, Rng& rng, std::size_t max_items,
                               std::size_t max_parts, std::size_t max_n) {
  Descriptor2 d{p.k(), {random_descriptor0(p, rng, max_items, max_n)}};
  if (p.k() == 0) return d;
  const std::size_t extra = rng.below(max_parts);
  for (std::size_t i = 0; i < extra; ++i) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Descriptor0 part{p.k(), {random_item(p, rng, max_n)}};
      const std::size_t more = rng.below(max_items);
      for (std::size_t j = 0; j < more; ++j) part.items.push_back(random_item(p, rng, max_n));
      if (!in_lambda1(part, p)) continue;
      d.parts.push_back(std::move(part));
      break;
    }
  }
  return d;
}

}  // namespace nortower
