#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nortower/group_k.hpp"
#include "nortower/random.hpp"

namespace nortower {

using Index = std::uint32_t;

// One factor: the chain t[lbar[0]], t[lbar[1]], ... with |eta| = |lbar| - 1 bits.
struct Item {
  std::vector<Index> lbar;
  std::vector<std::uint8_t> eta;

  int n() const noexcept { return static_cast<int>(lbar.size()) - 1; }
  auto operator<=>(const Item&) const = default;
};

// Word of items over tuple positions 0..k-1; evaluates into G.
struct Descriptor0 {
  std::size_t k = 0;
  std::vector<Item> items;

  bool empty() const noexcept { return items.empty(); }
  auto operator<=>(const Descriptor0&) const = default;
};

// parts[0] evaluates into G, each later part names one coset; evaluates into K.
struct Descriptor2 {
  std::size_t k = 0;
  std::vector<Descriptor0> parts;

  auto operator<=>(const Descriptor2&) const = default;
};

void validate(const Descriptor0& d);
// Also requires at least one part and nonempty parts after the first.
void validate(const Descriptor2& d);

// Items as "(0,1|0)" joined by ';', "-" when empty; parts joined by "||".
std::string render(const Descriptor0& d);
std::string render(const Descriptor2& d);
Descriptor0 parse_descriptor0(std::string_view text, std::size_t k);
Descriptor2 parse_descriptor2(std::string_view text, std::size_t k);

std::set<Index> support(const Descriptor0& d);
std::set<Index> support(const Descriptor2& d);

// p forces t[lbar[0]] > t[lbar[1]] > ... .
bool item_decreasing(const Item& item, const QfType& p);
// Every item is p-decreasing.
bool in_lambda0(const Descriptor0& d, const QfType& p);
// No part with strictly smaller support names the same coset of G^{<0}. A part
// naming the identity coset is never a member.
bool in_lambda1(const Descriptor0& d, const QfType& p);
// Every part after the first is nonempty and in lambda1.
bool in_lambda2(const Descriptor2& d, const QfType& p);
// No repeated items and n non-increasing along the word.
bool explicitly_reduced(const Descriptor0& d);

// A poset together with its groups. Universes are built on demand with the cap.
class Realization {
 public:
  static constexpr std::size_t kDefaultCap = 4096;

  explicit Realization(Poset p, std::size_t cap = kDefaultCap);
  Realization(const Realization&) = delete;
  Realization& operator=(const Realization&) = delete;

  const Poset& poset() const noexcept { return u_->poset(); }
  const GroupG& g() const noexcept { return g_; }
  const GroupK& k() const noexcept { return k_; }

 private:
  UniversePtr u_;
  GroupG g_;
  GroupK k_;
};

using RealizationPtr = std::shared_ptr<const Realization>;

struct Instance {
  RealizationPtr realization;
  std::vector<ElemId> tuple;
  std::string label;
};

// Probes for type enumeration: every poset on 1..max_points points up to
// isomorphism, ordered by size then by formatted text.
std::vector<Poset> standard_probes(std::size_t max_points = 4);

struct RealizedType {
  QfType type;
  std::size_t probe = 0;
  std::vector<ElemId> tuple;
};

struct TypeCatalog {
  std::size_t k = 0;
  std::vector<Poset> probes;
  // Sorted by type; each paired with its first realization (probe order, then
  // lexicographic tuple).
  std::vector<RealizedType> types;

  const RealizedType* find(const QfType& p) const;
};

TypeCatalog enumerate_qf_types(std::size_t k, std::vector<Poset> probes);
inline TypeCatalog enumerate_qf_types(std::size_t k) {
  return enumerate_qf_types(k, standard_probes(std::max<std::size_t>(k, 1)));
}

// The poset on the equality classes of p, ordered by p, with the tuple of class
// indices. A singleton poset for k = 0.
Instance canonical_instance(const QfType& p);
// canonical_instance first, then embeddings into larger posets whose induced
// order on the tuple is unchanged. Throws UnrealizableType.
std::vector<Instance> realizing_instances(const QfType& p, std::size_t count,
                                          std::uint64_t seed = 0);

GroupElement eval0(std::span<const ElemId> t, const Descriptor0& d, const GroupG& g);
KElement eval2(std::span<const ElemId> t, const Descriptor2& d, const GroupK& k);

// K value with cosets named by GroupG::coset_key; equal keys iff equal elements.
struct KKey {
  GroupElement g;
  std::vector<GroupElement> cosets;
  auto operator<=>(const KKey&) const = default;
};

KKey eval2_key(std::span<const ElemId> t, const Descriptor2& d, const GroupG& g);
KKey key_of(const KElement& x, const GroupG& g);

enum class EquivLevel { Group = 0, Coset = 1, Twisted = 2 };

// One verdict per instance; all of them realize p.
std::vector<bool> equivalence_verdicts(const Descriptor0& a, const Descriptor0& b,
                                       const QfType& p, EquivLevel level,
                                       const std::vector<Instance>& instances);
std::vector<bool> equivalence_verdicts(const Descriptor2& a, const Descriptor2& b,
                                       const QfType& p, const std::vector<Instance>& instances);

// Verdict on the canonical instance, checked against a second instance;
// InvariantViolation if they differ.
bool equivalent(const Descriptor0& a, const Descriptor0& b, const QfType& p, EquivLevel level);
bool equivalent(const Descriptor2& a, const Descriptor2& b, const QfType& p);

// The explicitly reduced word with the same value under p: normal-form letters,
// each tuple element named by its least position.
Descriptor0 explicit_normal_form(const Descriptor0& d, const QfType& p);

struct ReduceResult {
  Descriptor2 reduced;
  // Support subsets examined.
  std::size_t candidates = 0;
};

// Equivalent descriptor whose support has no equivalent proper subset.
// Subsets are searched by size, then lexicographically; ties resolve to the
// first hit. SearchBudgetExceeded once more than `budget` subsets are examined.
ReduceResult reduce_with_stats(const Descriptor2& d, const QfType& p,
                               std::size_t budget = 10000);
inline Descriptor2 reduce(const Descriptor2& d, const QfType& p, std::size_t budget = 10000) {
  return reduce_with_stats(d, p, budget).reduced;
}
bool is_reduced(const Descriptor2& d, const QfType& p);

// Value of the result is value(first) * value(second) in K.
Descriptor2 compose(const Descriptor2& first, const Descriptor2& second);
Descriptor2 inverse(const Descriptor2& d);
// Renames position i to i + offset and sets the arity to k.
Descriptor2 shift(const Descriptor2& d, std::size_t offset, std::size_t k);

struct QMap {
  std::size_t k = 0;
  std::map<QfType, Descriptor2> table;
  bool disjoint = false;
  bool reduced = false;
};

// Fills the table from fn over every type of the catalog and computes the flags.
QMap make_qmap(const TypeCatalog& catalog, const std::function<Descriptor2(const QfType&)>& fn);
void refresh_flags(QMap& q);

KElement eval_qmap(std::span<const ElemId> t, const QMap& q, const GroupK& k);
KKey eval_qmap_key(std::span<const ElemId> t, const QMap& q, const GroupG& g);

// q(p) = compose(q1(p restricted to the first k1), q2(p restricted to the rest)).
QMap compose(const QMap& q1, const QMap& q2, const TypeCatalog& catalog);
QMap inverse(const QMap& q);

// A p-decreasing item chain of random length with random bits, or an item on a
// repeated position with probability `fallback`.
Item random_item(const QfType& p, Rng& rng, std::size_t max_n, double fallback = 0.0);
Descriptor0 random_descriptor0(const QfType& p, Rng& rng, std::size_t max_items,
                               std::size_t max_n = 2, double fallback = 0.0);
// Parts after the first are drawn until they land in lambda1; a part that does
// not within a few draws is dropped.
Descriptor2 random_descriptor2(const QfType& p, Rng& rng, std::size_t max_items,
                               std::size_t max_parts, std::size_t max_n = 2);

}  // namespace nortower
