#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nortower/poset.hpp"

namespace nortower {

// A strictly decreasing chain tbar[0] > ... > tbar[n] with n bits.
struct ChainGen {
  std::vector<ElemId> tbar;
  std::vector<std::uint8_t> eta;

  int n() const noexcept { return static_cast<int>(tbar.size()) - 1; }
  ElemId bottom() const { return tbar.back(); }
  auto operator<=>(const ChainGen&) const = default;
};

// Canonical order <*: higher n first, then lexicographic on (tbar, eta).
bool star_less(const ChainGen& a, const ChainGen& b);

ChainGen restrict(const ChainGen& x, int n);

using GenId = std::uint32_t;

enum class LevelKind { Strict, Weak };

class GenUniverse {
 public:
  static constexpr std::size_t kDefaultCap = 20;

  const Poset& poset() const noexcept { return poset_; }
  const RankInfo& ranks() const noexcept { return ranks_; }
  std::size_t size() const noexcept { return gens_.size(); }
  std::uint64_t id() const noexcept { return id_; }

  // GenIds are positions under <*.
  const ChainGen& gen(GenId x) const { return gens_.at(x); }
  std::optional<GenId> find(const ChainGen& x) const;
  int n(GenId x) const { return static_cast<int>(gens_[x].tbar.size()) - 1; }
  int rk1(GenId x) const { return rk1_[x]; }
  int rk2(GenId x) const { return rk2_[x]; }

  GenId restrict(GenId x, int n) const;
  // Same chain with bit k flipped; k < n(x).
  GenId flip(GenId x, int k) const { return flip_[x][k]; }
  // Index y2 with g_x g_y g_x = g_y2.
  GenId conj_action(GenId x, GenId y) const {
    const int nx = n(x);
    if (n(y) > nx && restrict_[y][nx] == x) return flip_[y][nx];
    return y;
  }

  std::vector<GenId> level_set(int alpha, LevelKind kind) const;
  bool in_level_set(GenId x, int alpha, LevelKind kind) const {
    return kind == LevelKind::Strict ? rk2_[x] < alpha : rk2_[x] <= alpha;
  }

  std::string render(GenId x) const;
  GenId parse(std::string_view text) const;

 private:
  friend std::shared_ptr<const GenUniverse> enumerate_gens(const Poset& p, std::size_t cap);

  Poset poset_;
  RankInfo ranks_;
  std::vector<ChainGen> gens_;
  std::map<ChainGen, GenId> index_;
  std::vector<int> rk1_;
  std::vector<int> rk2_;
  std::vector<std::vector<GenId>> restrict_;
  std::vector<std::vector<GenId>> flip_;
  std::uint64_t id_ = 0;
};

using UniversePtr = std::shared_ptr<const GenUniverse>;

// Number of generators without materializing them.
std::uint64_t count_gens(const Poset& p);

UniversePtr enumerate_gens(const Poset& p, std::size_t cap = GenUniverse::kDefaultCap);

}  // namespace nortower
