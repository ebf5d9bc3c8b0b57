#include "nortower/normalizer.hpp"

#include <bit>
#include <map>

#include "nortower/random.hpp"

namespace nortower {

GTable::GTable(const GroupG& g) : g_(g) {
  if (g.universe().size() > 26)
    throw Error(ErrorKind::NotEnumerable,
                std::to_string(g.universe().size()) + " generators are too many to tabulate");
}

Subgroup GTable::level(int alpha) const {
  const Mask allowed = g_.level_mask(alpha, LevelKind::Strict);
  Subgroup s;
  s.member.assign(order(), 0);
  for (std::uint64_t m = 0; m < order(); ++m) s.member[m] = (m & ~allowed) == 0;
  for (Mask rest = allowed; rest; rest &= rest - 1) s.generators.push_back(rest & -rest);
  s.size = std::uint64_t{1} << std::popcount(allowed);
  s.label = "G^{<" + std::to_string(alpha) + "}";
  return s;
}

KTable::KTable(const GroupK& k) : k_(k), n_(k.g_group().universe().size()) {
  const GroupG& g = k.g_group();
  if (n_ > 20) throw Error(ErrorKind::NotEnumerable, "G too large to tabulate K");
  std::map<Coset, std::uint32_t> index;
  std::vector<Coset> of_mask;
  of_mask.reserve(std::size_t{1} << n_);
  for (Mask m = 0; m < (Mask{1} << n_); ++m) {
    of_mask.push_back(g.coset_of(g.from_mask(m)));
    index.emplace(of_mask.back(), 0);
  }
  if (n_ + index.size() > kMaxLog2Order)
    throw Error(ErrorKind::NotEnumerable,
                "K has 2^" + std::to_string(n_ + index.size()) + " elements");
  for (auto& [c, i] : index) {
    i = static_cast<std::uint32_t>(cosets_.size());
    cosets_.push_back(c);
    rep_masks_.push_back(g.to_mask(c.rep));
  }
  coset_index_.reserve(of_mask.size());
  for (const Coset& c : of_mask) coset_index_.push_back(index.at(c));
}

std::uint64_t KTable::act(std::uint64_t g, std::uint64_t h) const {
  const GroupG& G = k_.g_group();
  std::uint64_t out = 0;
  for (; h; h &= h - 1) {
    const auto a = static_cast<std::size_t>(std::countr_zero(h));
    out ^= std::uint64_t{1} << coset_index_[G.multiply_masks(g, rep_masks_[a])];
  }
  return out;
}

std::uint64_t KTable::multiply(std::uint64_t a, std::uint64_t b) const {
  const GroupG& G = k_.g_group();
  const std::size_t c = cosets_.size();
  const std::uint64_t hmask = (std::uint64_t{1} << c) - 1;
  const std::uint64_t ga = a >> c, gb = b >> c;
  const std::uint64_t h = act(G.inverse_mask(gb), a & hmask) ^ (b & hmask);
  return (G.multiply_masks(ga, gb) << c) | h;
}

std::uint64_t KTable::inverse(std::uint64_t a) const {
  const GroupG& G = k_.g_group();
  const std::size_t c = cosets_.size();
  const std::uint64_t g = a >> c;
  return (G.inverse_mask(g) << c) | act(g, a & ((std::uint64_t{1} << c) - 1));
}

std::uint64_t KTable::encode(const KElement& p) const {
  const GroupG& G = k_.g_group();
  std::uint64_t h = 0;
  for (const Coset& a : p.h.cosets())
    h |= std::uint64_t{1} << coset_index_[G.to_mask(a.rep)];
  return (G.to_mask(p.g) << cosets_.size()) | h;
}

KElement KTable::decode(std::uint64_t x) const {
  const GroupG& G = k_.g_group();
  KElement p{G.from_mask(x >> cosets_.size()), {}};
  for (std::size_t a = 0; a < cosets_.size(); ++a)
    if ((x >> a) & 1) p.h.toggle(cosets_[a]);
  return p;
}

Subgroup KTable::h_subgroup() const {
  const std::uint64_t hs = std::uint64_t{1} << coset_index_[0];
  return generated_subgroup(*this, {hs}, "H");
}

Subgroup KTable::preimage(const Subgroup& s, std::string label) const {
  const std::size_t c = cosets_.size();
  Subgroup out;
  out.member.assign(order(), 0);
  for (std::uint64_t x = 0; x < order(); ++x) out.member[x] = s.member[x >> c];
  for (std::uint64_t g : s.generators) out.generators.push_back(g << c);
  for (std::size_t a = 0; a < c; ++a) out.generators.push_back(std::uint64_t{1} << a);
  out.size = s.size << c;
  out.label = std::move(label);
  return out;
}

KTowerReport tower_k_fast(const Poset& p, std::size_t cap, std::size_t h_samples,
                          std::uint64_t seed) {
  const UniversePtr u = enumerate_gens(p, cap);
  const GroupG G(u, cap);
  const GroupK K(G);
  const GTable table(G);
  Rng rng(seed);

  KTowerReport report;
  const KElement hs = K.h_star();
  const std::size_t c_log2 = G.coset_count_log2();

  // First normalizer of H: the g whose (g, h) commute with h_star.
  Subgroup first;
  first.member.assign(table.order(), 0);
  first.label = "K^{<0}";
  for (std::uint64_t m = 0; m < table.order(); ++m) {
    const GroupElement g = G.from_mask(m);
    const bool verdict = K.commutes(K.from_g(g), hs);
    for (std::size_t s = 0; s < h_samples; ++s) {
      KElement q{g, {}};
      const std::size_t support = 1 + rng.below(3);
      for (std::size_t i = 0; i < support; ++i)
        q.h.toggle(G.coset_of(G.from_mask(rng.below(table.order()))));
      ++report.commutation_checks;
      if (K.commutes(q, hs) != verdict) ++report.commutation_mismatches;
    }
    if (verdict != G.in_level(g, 0, LevelKind::Strict)) ++report.commutation_mismatches;
    first.member[m] = verdict;
  }
  validate_subgroup(table, first);

  std::vector<Subgroup> g_levels;
  g_levels.push_back(std::move(first));
  for (int step = 0;; ++step) {
    if (step > 64) throw Error(ErrorKind::StepLimitExceeded, "G-side tower did not stabilize");
    Subgroup next = normalizer(table, g_levels.back());
    if (next.same_members(g_levels.back())) break;
    g_levels.push_back(std::move(next));
  }

  TowerReport& t = report.tower;
  t.levels.push_back(make_level(2, "H"));
  report.g_part_sizes.push_back(1);
  std::vector<std::uint8_t> identity_only(table.order(), 0);
  identity_only[0] = 1;
  report.g_parts.push_back(identity_only);
  for (std::size_t i = 0; i < g_levels.size(); ++i) {
    const std::string label = i == 0 ? "K^{<0}" : "pre(nor^" + std::to_string(i) + ")";
    const std::uint64_t log2_size =
        static_cast<std::uint64_t>(std::countr_zero(g_levels[i].size)) + (std::uint64_t{1} << c_log2);
    t.levels.push_back({log2_size < 64 ? std::uint64_t{1} << log2_size : 0, log2_size, label});
    report.g_part_sizes.push_back(g_levels[i].size);
    report.g_parts.push_back(g_levels[i].member);
  }
  // H equals its normalizer only when K^{<0} has two elements.
  const bool h_stable = t.levels[1].log2_size == 1;
  t.length = h_stable ? 0 : static_cast<int>(g_levels.size());
  if (h_stable) t.levels.resize(1);
  t.reaches_ambient = g_levels.back().size == table.order();
  t.expected = 1 + u->ranks().rk_of_poset;
  return report;
}

LevelNormalizerReport check_level_normalizers(const Poset& p, std::size_t w, std::size_t cap) {
  const UniversePtr u = enumerate_gens(p, cap);
  const GroupG G(u, cap);
  const GTable table(G);
  LevelNormalizerReport report;
  const int top = u->ranks().rk_of_poset;
  for (int alpha = 0; alpha < top; ++alpha) {
    const Subgroup level = table.level(alpha);
    const Subgroup next = table.level(alpha + 1);
    const Subgroup nor = normalizer(table, level);
    LevelNormalizerRow row;
    row.alpha = alpha;
    row.level_size = level.size;
    row.next_level_size = next.size;
    row.normalizer_size = nor.size;
    row.superset = true;
    for (std::uint64_t m = 0; m < table.order(); ++m)
      if (next.member[m] && !nor.member[m]) row.superset = false;
    row.equal = nor.same_members(next);
    report.rows.push_back(row);
  }
  const Subgroup whole = table.level(top);
  report.top_stable = normalizer(table, whole).same_members(whole);
  report.w_nontrivial = is_w_nontrivial(p, w).holds;
  return report;
}

}  // namespace nortower
