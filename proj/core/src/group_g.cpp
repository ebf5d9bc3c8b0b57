#include "nortower/group_g.hpp"

#include <algorithm>
#include <bit>
#include <mutex>

#include "nortower/error.hpp"
#include "text.hpp"

namespace nortower {

namespace {

Mask word_to_mask(std::span<const GenId> word) {
  Mask m = 0;
  for (GenId x : word) m |= Mask{1} << x;
  return m;
}

std::size_t mask_to_buf(Mask m, GenId* buf) {
  std::size_t len = 0;
  while (m) {
    buf[len++] = static_cast<GenId>(std::countr_zero(m));
    m &= m - 1;
  }
  return len;
}

}  // namespace

bool GeneratedSubgroup::contains(const GroupElement& g) const {
  return std::all_of(g.word().begin(), g.word().end(),
                     [&](GenId x) { return x < member.size() && member[x]; });
}

GroupG::GroupG(UniversePtr universe, std::size_t enum_cap)
    : universe_(std::move(universe)),
      enum_cap_(enum_cap),
      below_zero_(universe_->level_set(0, LevelKind::Strict)) {}

void GroupG::check(const GroupElement& g) const {
  if (g.universe_ != universe_->id())
    throw Error(ErrorKind::UniverseMismatch, "element belongs to a different universe");
}

void GroupG::require_mask() const {
  if (universe_->size() > kMaxMaskGens)
    throw Error(ErrorKind::UniverseTooLarge, "mask form needs at most 64 generators");
}

GroupElement GroupG::gen(GenId x) const {
  if (x >= universe_->size()) throw Error(ErrorKind::IndexOutOfRange, "generator index");
  return {universe_->id(), {x}};
}

std::size_t GroupG::normalize(GenId* buf, std::size_t len) const {
  const GenUniverse& u = *universe_;
  // Every pair right of `hint` is in order; scan left for the rightmost inversion.
  std::ptrdiff_t hint = static_cast<std::ptrdiff_t>(len) - 2;
  while (true) {
    std::ptrdiff_t i = std::min(hint, static_cast<std::ptrdiff_t>(len) - 2);
    while (i >= 0 && buf[i] < buf[i + 1]) --i;
    if (i < 0) return len;
    const GenId x = buf[i];
    const GenId y = buf[i + 1];
    if (x == y) {
      std::copy(buf + i + 2, buf + len, buf + i);
      len -= 2;
      hint = i - 1;
    } else {
      // y <* x, so n(y) >= n(x).
      buf[i] = u.n(y) > u.n(x) ? u.conj_action(x, y) : y;
      buf[i + 1] = x;
      hint = i + 1;
    }
  }
}

GroupElement GroupG::from_word(std::span<const GenId> word) const {
  for (GenId x : word)
    if (x >= universe_->size()) throw Error(ErrorKind::IndexOutOfRange, "generator index");
  std::vector<GenId> buf(word.begin(), word.end());
  buf.resize(normalize(buf.data(), buf.size()));
  return {universe_->id(), std::move(buf)};
}

GroupElement GroupG::multiply(const GroupElement& a, const GroupElement& b) const {
  check(a);
  check(b);
  std::vector<GenId> buf;
  buf.reserve(a.length() + b.length());
  buf.insert(buf.end(), a.word_.begin(), a.word_.end());
  buf.insert(buf.end(), b.word_.begin(), b.word_.end());
  buf.resize(normalize(buf.data(), buf.size()));
  return {universe_->id(), std::move(buf)};
}

GroupElement GroupG::inverse(const GroupElement& g) const {
  check(g);
  std::vector<GenId> buf(g.word_.rbegin(), g.word_.rend());
  buf.resize(normalize(buf.data(), buf.size()));
  return {universe_->id(), std::move(buf)};
}

GroupElement GroupG::conjugate(const GroupElement& a, const GroupElement& b) const {
  return multiply(multiply(b, a), inverse(b));
}

bool GroupG::in_level(const GroupElement& g, int alpha, LevelKind kind) const {
  check(g);
  return std::all_of(g.word_.begin(), g.word_.end(),
                     [&](GenId x) { return universe_->in_level_set(x, alpha, kind); });
}

std::vector<GroupElement> GroupG::enumerate() const {
  if (universe_->size() > enum_cap_)
    throw Error(ErrorKind::UniverseTooLarge,
                std::to_string(universe_->size()) + " generators exceed enumeration cap " +
                    std::to_string(enum_cap_));
  std::vector<GroupElement> out;
  out.reserve(std::size_t{1} << universe_->size());
  for (Mask m = 0; m < (Mask{1} << universe_->size()); ++m) out.push_back(from_mask(m));
  return out;
}

Mask GroupG::to_mask(const GroupElement& g) const {
  check(g);
  require_mask();
  return word_to_mask(g.word_);
}

GroupElement GroupG::from_mask(Mask m) const {
  require_mask();
  GenId buf[kMaxMaskGens];
  const std::size_t len = mask_to_buf(m, buf);
  return {universe_->id(), std::vector<GenId>(buf, buf + len)};
}

Mask GroupG::multiply_masks(Mask a, Mask b) const {
  GenId buf[2 * kMaxMaskGens];
  std::size_t len = mask_to_buf(a, buf);
  len += mask_to_buf(b, buf + len);
  len = normalize(buf, len);
  return word_to_mask({buf, len});
}

Mask GroupG::inverse_mask(Mask a) const {
  GenId buf[kMaxMaskGens];
  const std::size_t len = mask_to_buf(a, buf);
  std::reverse(buf, buf + len);
  return word_to_mask({buf, normalize(buf, len)});
}

Mask GroupG::level_mask(int alpha, LevelKind kind) const {
  require_mask();
  return word_to_mask(universe_->level_set(alpha, kind));
}

GroupElement GroupG::coset_key(const GroupElement& g) const {
  check(g);
  const GenUniverse& u = *universe_;
  // Words list levels in decreasing n, so the part below a level is a suffix.
  // Dropping z is right multiplication by l^-1 z l, which leaves other levels alone.
  std::vector<GenId> kept;
  std::size_t end = g.word_.size();
  while (end > 0) {
    const int level = u.n(g.word_[end - 1]);
    std::size_t begin = end;
    while (begin > 0 && u.n(g.word_[begin - 1]) == level) --begin;
    std::vector<GenId> segment;
    for (std::size_t i = begin; i < end; ++i) {
      GenId x = g.word_[i];
      for (GenId y : kept) x = u.conj_action(y, x);
      if (!u.in_level_set(x, 0, LevelKind::Strict)) segment.push_back(g.word_[i]);
    }
    kept.insert(kept.begin(), segment.begin(), segment.end());
    end = begin;
  }
  return {universe_->id(), std::move(kept)};
}

Coset GroupG::coset_of(const GroupElement& g) const {
  const std::vector<GenId> key = coset_key(g).word_;
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = coset_cache_.find(key); it != coset_cache_.end())
      return Coset{GroupElement(universe_->id(), it->second)};
  }
  if (below_zero_.size() > enum_cap_)
    throw Error(ErrorKind::UniverseTooLarge,
                std::to_string(below_zero_.size()) + " generators below level 0 exceed cap " +
                    std::to_string(enum_cap_));
  const std::size_t k = below_zero_.size();
  std::vector<std::vector<GenId>> members;
  members.reserve(std::size_t{1} << k);
  std::vector<GenId> buf;
  for (std::uint64_t sub = 0; sub < (std::uint64_t{1} << k); ++sub) {
    buf.assign(g.word_.begin(), g.word_.end());
    for (std::size_t i = 0; i < k; ++i)
      if ((sub >> i) & 1) buf.push_back(below_zero_[i]);
    buf.resize(normalize(buf.data(), buf.size()));
    members.push_back(buf);
  }
  const std::vector<GenId> rep = *std::min_element(members.begin(), members.end());
  std::unique_lock lock(cache_mutex_);
  coset_cache_.emplace(key, rep);
  return Coset{GroupElement(universe_->id(), rep)};
}

bool GroupG::same_coset(const GroupElement& a, const GroupElement& b) const {
  return in_level(multiply(inverse(a), b), 0, LevelKind::Strict);
}

std::size_t GroupG::coset_count_log2() const {
  return universe_->size() - below_zero_.size();
}

GeneratedSubgroup GroupG::subgroup_from_gens(std::vector<GenId> gens) const {
  std::sort(gens.begin(), gens.end());
  gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
  GeneratedSubgroup s;
  s.member.assign(universe_->size(), 0);
  for (GenId x : gens) {
    if (x >= universe_->size()) throw Error(ErrorKind::IndexOutOfRange, "generator index");
    s.member[x] = 1;
  }
  for (GenId x : gens)
    for (GenId y1 : gens) {
      const GenId y2 = universe_->conj_action(x, y1);
      if (!s.member[y2])
        throw Error(ErrorKind::NotConjClosed, universe_->render(x) + " " + universe_->render(y1) +
                                                  " -> " + universe_->render(y2));
    }
  s.gens = std::move(gens);
  return s;
}

std::string GroupG::render(const GroupElement& g) const {
  if (g.is_identity()) return "e";
  std::string out;
  for (std::size_t i = 0; i < g.word_.size(); ++i)
    out += (i ? "*" : "") + universe_->render(g.word_[i]);
  return out;
}

GroupElement GroupG::parse(std::string_view text) const {
  if (text == "e") return identity();
  std::vector<GenId> word;
  for (const auto& part : detail::split(text, '*')) word.push_back(universe_->parse(part));
  return from_word(word);
}

LevelOracle::LevelOracle(UniversePtr universe) : universe_(std::move(universe)) {
  const GenUniverse& u = *universe_;
  const std::size_t m = u.size();
  level_.resize(m);
  local_.resize(m);
  prefix_.resize(m);
  flipped_.resize(m);
  for (GenId x = 0; x < m; ++x) {
    const ChainGen& g = u.gen(x);
    const int n = g.n();
    if (static_cast<int>(by_level_.size()) <= n) by_level_.resize(n + 1);
    level_[x] = n;
    local_[x] = by_level_[n].size();
    by_level_[n].push_back(x);
    for (int k = 0; k < n; ++k) {
      ChainGen head{{g.tbar.begin(), g.tbar.begin() + k + 1}, {g.eta.begin(), g.eta.begin() + k}};
      ChainGen flip = g;
      flip.eta[k] ^= 1;
      prefix_[x].push_back(*u.find(head));
      flipped_[x].push_back(*u.find(flip));
    }
  }
}

OracleElement LevelOracle::identity() const {
  OracleElement v;
  for (const auto& level : by_level_) v.levels.emplace_back(level.size(), false);
  return v;
}

OracleElement LevelOracle::from_element(const GroupElement& g) const {
  OracleElement v = identity();
  for (GenId x : g.word()) v.levels[level_[x]][local_[x]] = true;
  return v;
}

std::vector<GenId> LevelOracle::to_word(const OracleElement& v) const {
  std::vector<GenId> word;
  for (std::size_t n = 0; n < by_level_.size(); ++n)
    for (std::size_t i = 0; i < by_level_[n].size(); ++i)
      if (v.levels[n][i]) word.push_back(by_level_[n][i]);
  std::sort(word.begin(), word.end());
  return word;
}

OracleElement LevelOracle::multiply(const OracleElement& a, const OracleElement& b) const {
  // Level j of a*b is a_j + (pi_{a_{j-1}} o ... o pi_{a_0})(b_j), where
  // pi_{a_k} flips bit k of y whenever the length-k prefix of y lies in a_k.
  OracleElement out = a;
  for (std::size_t j = 0; j < by_level_.size(); ++j) {
    for (std::size_t i = 0; i < by_level_[j].size(); ++i) {
      if (!b.levels[j][i]) continue;
      GenId y = by_level_[j][i];
      for (std::size_t k = 0; k < j; ++k)
        if (has(a, prefix_[y][k])) y = flipped_[y][k];
      out.levels[j][local_[y]].flip();
    }
  }
  return out;
}

}  // namespace nortower
