#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nortower {

using ElemId = std::uint32_t;

// Unvalidated poset data as read from a file.
struct RawPoset {
  std::vector<std::string> elements;
  std::vector<std::pair<std::string, std::string>> lt;
};

// Finite strict partial order. Elements are indexed 0..size()-1 in
// declaration order; the relation is stored transitively closed.
class Poset {
 public:
  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ElemId t) const { return names_.at(t); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<ElemId> find(std::string_view name) const;

  bool less(ElemId a, ElemId b) const { return lt_[a * size() + b] != 0; }
  bool comparable(ElemId a, ElemId b) const {
    return a == b || less(a, b) || less(b, a);
  }
  // Strictly smaller elements, ascending by id.
  const std::vector<ElemId>& below(ElemId t) const { return below_.at(t); }
  // All pairs (a, b) with a < b, ordered by (a, b).
  std::vector<std::pair<ElemId, ElemId>> lt_pairs() const;
  // Covering pairs of the order.
  std::vector<std::pair<ElemId, ElemId>> hasse_pairs() const;

  // Sub-poset on the given elements, in the given order.
  Poset induced(std::span<const ElemId> elems) const;

  bool operator==(const Poset& other) const = default;

 private:
  friend Poset validate_poset(const RawPoset& raw);
  friend Poset make_poset(std::vector<std::string> names,
                          const std::vector<std::pair<ElemId, ElemId>>& lt);

  std::vector<std::string> names_;
  std::vector<std::uint8_t> lt_;
  std::vector<std::vector<ElemId>> below_;
};

// Rejects empty element sets, duplicate names, unknown names, reflexive
// pairs and cycles; returns the transitive closure.
Poset validate_poset(const RawPoset& raw);
Poset make_poset(std::vector<std::string> names,
                 const std::vector<std::pair<ElemId, ElemId>>& lt);

RawPoset parse_poset(std::string_view text);
std::string format_poset(const Poset& p);

struct RankInfo {
  std::vector<int> rk;
  int rk_of_poset = 0;
  std::vector<std::vector<ElemId>> levels;
  std::vector<int> rk_inf;
};

RankInfo rank(const Poset& p);

struct NontrivialityReport {
  bool holds = true;
  // Same check counting elements of rank exactly beta.
  bool holds_exact_reading = true;
  std::vector<std::pair<ElemId, int>> failures;
  std::vector<std::pair<ElemId, int>> failures_exact_reading;
};

NontrivialityReport is_w_nontrivial(const Poset& p, std::size_t w);

struct ExplicitReport {
  bool holds = false;
  std::vector<std::vector<ElemId>> classes;
  // explicit(w) implies nontrivial(w) on this instance.
  bool implication_holds = true;
};

ExplicitReport is_explicitly_nontrivial_surrogate(const Poset& p, std::size_t w);

// Quantifier-free type of a k-tuple: code(l1, l2) is 0 for <, 1 for =,
// 2 for >, 3 for incomparable.
class QfType {
 public:
  QfType() = default;
  QfType(std::size_t k, std::vector<std::uint8_t> codes);

  std::size_t k() const noexcept { return k_; }
  std::uint8_t code(std::size_t l1, std::size_t l2) const {
    return codes_[l1 * k_ + l2];
  }
  const std::vector<std::uint8_t>& codes() const noexcept { return codes_; }
  // Rows of '<', '=', '>', '|' separated by '/'.
  std::string render() const;
  static QfType parse(std::string_view text);
  // Codes form a consistent type (equality is an equivalence, order a strict
  // partial order compatible with it).
  bool consistent() const;
  QfType restrict(std::span<const std::size_t> indices) const;

  auto operator<=>(const QfType&) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint8_t> codes_;
};

QfType qf_type(std::span<const ElemId> tuple, const Poset& p);
QfType qf_type(std::span<const std::string> tuple, const Poset& p);

Poset make_wide_poset(std::size_t m, std::size_t n);
Poset make_chain(std::size_t n);
Poset make_antichain(std::size_t n);
Poset random_poset(std::uint64_t seed, std::size_t n, double density);

}  // namespace nortower
