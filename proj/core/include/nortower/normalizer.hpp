#pragma once

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nortower/error.hpp"
#include "nortower/group_k.hpp"

namespace nortower {

// A finite group whose elements are the indices 0..order()-1.
template <class G>
concept IndexedGroup = requires(const G& g, std::uint64_t a, std::uint64_t b) {
  { g.order() } -> std::convertible_to<std::uint64_t>;
  { g.identity() } -> std::convertible_to<std::uint64_t>;
  { g.multiply(a, b) } -> std::convertible_to<std::uint64_t>;
  { g.inverse(a) } -> std::convertible_to<std::uint64_t>;
};

struct Subgroup {
  std::vector<std::uint8_t> member;
  std::vector<std::uint64_t> generators;
  std::uint64_t size = 0;
  std::string label;

  bool contains(std::uint64_t x) const { return member[x] != 0; }
  bool same_members(const Subgroup& other) const { return member == other.member; }
};

enum class NormalizerMode { Generators, AllElements };

// Sizes are powers of two; `size` is 0 when it does not fit in 64 bits.
struct TowerLevel {
  std::uint64_t size = 0;
  std::uint64_t log2_size = 0;
  std::string label;
};

inline TowerLevel make_level(std::uint64_t size, std::string label) {
  return {size, static_cast<std::uint64_t>(std::bit_width(size) - 1), std::move(label)};
}

struct TowerReport {
  std::vector<TowerLevel> levels;
  int length = 0;
  bool reaches_ambient = false;
  std::optional<int> expected;
  bool match() const { return expected && *expected == length; }
};

// G as masks over its generators.
class GTable {
 public:
  explicit GTable(const GroupG& g);
  const GroupG& group() const noexcept { return g_; }
  std::uint64_t order() const noexcept { return std::uint64_t{1} << g_.universe().size(); }
  std::uint64_t identity() const noexcept { return 0; }
  std::uint64_t multiply(std::uint64_t a, std::uint64_t b) const { return g_.multiply_masks(a, b); }
  std::uint64_t inverse(std::uint64_t a) const { return g_.inverse_mask(a); }

  // G^{<alpha}, generated by its level generators.
  Subgroup level(int alpha) const;

 private:
  const GroupG& g_;
};

// K = G x L fully enumerated; index = g_mask * 2^c + h_bits over the c cosets.
class KTable {
 public:
  static constexpr std::size_t kMaxLog2Order = 24;

  explicit KTable(const GroupK& k);
  std::uint64_t order() const noexcept { return std::uint64_t{1} << (n_ + cosets_.size()); }
  std::uint64_t identity() const noexcept { return 0; }
  std::uint64_t multiply(std::uint64_t a, std::uint64_t b) const;
  std::uint64_t inverse(std::uint64_t a) const;

  std::uint64_t encode(const KElement& p) const;
  KElement decode(std::uint64_t x) const;
  std::uint64_t g_part(std::uint64_t x) const { return x >> cosets_.size(); }
  std::size_t coset_count() const noexcept { return cosets_.size(); }

  Subgroup h_subgroup() const;
  // Elements whose g-part lies in s.
  Subgroup preimage(const Subgroup& s, std::string label) const;

 private:
  std::uint64_t act(std::uint64_t g, std::uint64_t h) const;

  const GroupK& k_;
  std::size_t n_;
  std::vector<Coset> cosets_;
  std::vector<std::uint64_t> rep_masks_;
  std::vector<std::uint32_t> coset_index_;
};

// Runs fn(begin, end) over a partition of [0, total) on the available cores.
template <class Fn>
void parallel_ranges(std::uint64_t total, Fn fn) {
  const std::uint64_t workers =
      std::clamp<std::uint64_t>(std::thread::hardware_concurrency(), 1, 16);
  if (workers == 1 || total < 4096) {
    fn(std::uint64_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (total + workers - 1) / workers;
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(total, begin + chunk);
    if (begin < end) pool.emplace_back([=, &fn] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Closure of gens under multiplication.
template <IndexedGroup G>
Subgroup generated_subgroup(const G& group, const std::vector<std::uint64_t>& gens,
                            std::string label) {
  Subgroup s;
  s.member.assign(group.order(), 0);
  s.label = std::move(label);
  std::vector<std::uint64_t> queue{group.identity()};
  s.member[group.identity()] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head)
    for (std::uint64_t x : gens) {
      const std::uint64_t y = group.multiply(queue[head], x);
      if (!s.member[y]) {
        s.member[y] = 1;
        queue.push_back(y);
      }
    }
  s.size = queue.size();
  s.generators = gens;
  return s;
}

// Replaces s.generators by a greedy generating set and checks that the
// members form a subgroup.
template <IndexedGroup G>
void validate_subgroup(const G& group, Subgroup& s) {
  std::vector<std::uint64_t> gens;
  Subgroup span = generated_subgroup(group, gens, s.label);
  std::uint64_t count = 0;
  for (std::uint64_t x = 0; x < group.order(); ++x) {
    if (!s.member[x]) continue;
    ++count;
    if (span.member[x]) continue;
    gens.push_back(x);
    span = generated_subgroup(group, gens, s.label);
    for (std::uint64_t y = 0; y < group.order(); ++y)
      if (span.member[y] && !s.member[y])
        throw Error(ErrorKind::InvariantViolation, s.label + " is not closed under products");
  }
  if (!s.member[group.identity()])
    throw Error(ErrorKind::InvariantViolation, s.label + " misses the identity");
  s.size = count;
  s.generators = std::move(gens);
}

template <IndexedGroup G>
Subgroup normalizer(const G& group, const Subgroup& s,
                    NormalizerMode mode = NormalizerMode::Generators) {
  std::vector<std::uint64_t> tested;
  if (mode == NormalizerMode::Generators) {
    tested = s.generators;
  } else {
    for (std::uint64_t x = 0; x < group.order(); ++x)
      if (s.member[x]) tested.push_back(x);
  }
  Subgroup out;
  out.member.assign(group.order(), 0);
  out.label = "nor(" + s.label + ")";
  parallel_ranges(group.order(), [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t g = begin; g < end; ++g) {
      const std::uint64_t ginv = group.inverse(g);
      bool ok = true;
      for (std::uint64_t x : tested) {
        if (!s.member[group.multiply(group.multiply(g, x), ginv)] ||
            !s.member[group.multiply(group.multiply(ginv, x), g)]) {
          ok = false;
          break;
        }
      }
      out.member[g] = ok;
    }
  });
  validate_subgroup(group, out);
  return out;
}

template <IndexedGroup G>
TowerReport tower(const G& group, Subgroup start, int max_steps) {
  TowerReport report;
  Subgroup current = std::move(start);
  report.levels.push_back(make_level(current.size, current.label));
  for (int step = 0;; ++step) {
    if (step >= max_steps)
      throw Error(ErrorKind::StepLimitExceeded,
                  "no stabilization within " + std::to_string(max_steps) + " steps");
    Subgroup next = normalizer(group, current);
    next.label = "nor^" + std::to_string(step + 1);
    if (next.same_members(current)) {
      // One further step must also agree.
      if (!normalizer(group, next).same_members(next))
        throw Error(ErrorKind::InvariantViolation, "tower moved after stabilizing");
      report.length = step;
      report.reaches_ambient = current.size == group.order();
      return report;
    }
    report.levels.push_back(make_level(next.size, next.label));
    current = std::move(next);
  }
}

struct KTowerReport {
  TowerReport tower;
  // g-part sizes per level; level 0 is H and level 1 is the first normalizer.
  std::vector<std::uint64_t> g_part_sizes;
  std::vector<std::vector<std::uint8_t>> g_parts;
  std::uint64_t commutation_checks = 0;
  std::uint64_t commutation_mismatches = 0;
};

// K-side tower through the projection onto G.
KTowerReport tower_k_fast(const Poset& p, std::size_t cap = GenUniverse::kDefaultCap,
                          std::size_t h_samples = 8, std::uint64_t seed = 0);

struct LevelNormalizerRow {
  int alpha = 0;
  std::uint64_t level_size = 0;
  std::uint64_t next_level_size = 0;
  std::uint64_t normalizer_size = 0;
  bool superset = false;
  bool equal = false;
};

struct LevelNormalizerReport {
  std::vector<LevelNormalizerRow> rows;
  // The normalizer of G^{<rk(I)} = G is G.
  bool top_stable = false;
  bool w_nontrivial = false;
  bool superset_everywhere() const {
    return std::all_of(rows.begin(), rows.end(), [](const LevelNormalizerRow& r) { return r.superset; });
  }
};

LevelNormalizerReport check_level_normalizers(const Poset& p, std::size_t w, std::size_t cap = GenUniverse::kDefaultCap);

}  // namespace nortower
