#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nortower/chains.hpp"

namespace nortower {

// Normal form: strictly <*-increasing generator word; empty is the identity.
class GroupElement {
 public:
  GroupElement() = default;

  const std::vector<GenId>& word() const noexcept { return word_; }
  bool is_identity() const noexcept { return word_.empty(); }
  std::size_t length() const noexcept { return word_.size(); }
  std::uint64_t universe_id() const noexcept { return universe_; }

  // Word-lexicographic by order index.
  auto operator<=>(const GroupElement&) const = default;

 private:
  friend class GroupG;
  GroupElement(std::uint64_t universe, std::vector<GenId> word)
      : universe_(universe), word_(std::move(word)) {}

  std::uint64_t universe_ = 0;
  std::vector<GenId> word_;
};

// Left coset g G^{<0}, named by its least member.
struct Coset {
  GroupElement rep;
  auto operator<=>(const Coset&) const = default;
};

using Mask = std::uint64_t;

// Sub-universe closed under the conjugation action.
struct GeneratedSubgroup {
  std::vector<GenId> gens;
  std::vector<std::uint8_t> member;

  bool contains(const GroupElement& g) const;
};

class GroupG {
 public:
  static constexpr std::size_t kMaxMaskGens = 64;

  explicit GroupG(UniversePtr universe, std::size_t enum_cap = GenUniverse::kDefaultCap);

  const GenUniverse& universe() const noexcept { return *universe_; }
  const UniversePtr& universe_ptr() const noexcept { return universe_; }

  GroupElement identity() const { return {universe_->id(), {}}; }
  GroupElement gen(GenId x) const;
  // Normalizes an arbitrary word.
  GroupElement from_word(std::span<const GenId> word) const;

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& g) const;
  // b a b^-1.
  GroupElement conjugate(const GroupElement& a, const GroupElement& b) const;
  bool in_level(const GroupElement& g, int alpha, LevelKind kind) const;

  // All 2^|X| elements in mask order; requires |X| <= enumeration cap.
  std::vector<GroupElement> enumerate() const;
  std::uint64_t order_log2() const noexcept { return universe_->size(); }

  // Rewrites buf[0..len) in place to normal form and returns the new length.
  std::size_t normalize(GenId* buf, std::size_t len) const;

  // Bit x of a mask marks generator x; requires |X| <= 64.
  Mask to_mask(const GroupElement& g) const;
  GroupElement from_mask(Mask m) const;
  Mask multiply_masks(Mask a, Mask b) const;
  Mask inverse_mask(Mask a) const;
  Mask level_mask(int alpha, LevelKind kind) const;

  Coset coset_of(const GroupElement& g) const;
  // The unique member of g G^{<0} with no letter z at any level n for which
  // l^-1 z l has a zero bit, l being the part of the word below level n.
  // Linear in the coset count, needs no enumeration.
  GroupElement coset_key(const GroupElement& g) const;
  bool same_coset(const GroupElement& a, const GroupElement& b) const;
  // log2 of the number of left cosets of G^{<0}.
  std::size_t coset_count_log2() const;

  GeneratedSubgroup subgroup_from_gens(std::vector<GenId> gens) const;

  std::string render(const GroupElement& g) const;
  GroupElement parse(std::string_view text) const;

 private:
  void check(const GroupElement& g) const;
  void require_mask() const;

  UniversePtr universe_;
  std::size_t enum_cap_;
  std::vector<GenId> below_zero_;
  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::vector<GenId>, std::vector<GenId>> coset_cache_;
};

// Level decomposition: levels[n][i] marks the i-th generator of level n.
struct OracleElement {
  std::vector<std::vector<bool>> levels;
  bool operator==(const OracleElement&) const = default;
};

// Multiplication through the iterated semidirect structure, independent of
// the rewriting engine.
class LevelOracle {
 public:
  explicit LevelOracle(UniversePtr universe);

  OracleElement identity() const;
  OracleElement from_element(const GroupElement& g) const;
  std::vector<GenId> to_word(const OracleElement& v) const;
  OracleElement multiply(const OracleElement& a, const OracleElement& b) const;

 private:
  bool has(const OracleElement& v, GenId x) const {
    return v.levels[level_[x]][local_[x]];
  }

  UniversePtr universe_;
  std::vector<int> level_;
  std::vector<std::size_t> local_;
  std::vector<std::vector<GenId>> by_level_;
  std::vector<std::vector<GenId>> prefix_;
  std::vector<std::vector<GenId>> flipped_;
};

}  // namespace nortower
