#include "nortower/chains.hpp"

#include <algorithm>
#include <atomic>

#include "nortower/error.hpp"
#include "text.hpp"

namespace nortower {

bool star_less(const ChainGen& a, const ChainGen& b) {
  if (a.tbar.size() != b.tbar.size()) return a.tbar.size() > b.tbar.size();
  if (a.tbar != b.tbar) return a.tbar < b.tbar;
  return a.eta < b.eta;
}

ChainGen restrict(const ChainGen& x, int n) {
  if (n < 0 || n > x.n())
    throw Error(ErrorKind::IndexOutOfRange,
                "restrict to " + std::to_string(n) + " of a chain with n=" + std::to_string(x.n()));
  return ChainGen{{x.tbar.begin(), x.tbar.begin() + n + 1}, {x.eta.begin(), x.eta.begin() + n}};
}

std::optional<GenId> GenUniverse::find(const ChainGen& x) const {
  auto it = index_.find(x);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GenId GenUniverse::restrict(GenId x, int n) const {
  if (n < 0 || n > this->n(x))
    throw Error(ErrorKind::IndexOutOfRange, "restrict beyond n(x)");
  return restrict_[x][n];
}

std::vector<GenId> GenUniverse::level_set(int alpha, LevelKind kind) const {
  std::vector<GenId> out;
  for (GenId x = 0; x < size(); ++x)
    if (in_level_set(x, alpha, kind)) out.push_back(x);
  return out;
}

std::string GenUniverse::render(GenId x) const {
  const ChainGen& g = gens_.at(x);
  std::string out = "(";
  for (std::size_t i = 0; i < g.tbar.size(); ++i) out += (i ? ">" : "") + poset_.name(g.tbar[i]);
  out += ';';
  for (auto b : g.eta) out += static_cast<char>('0' + b);
  return out + ')';
}

GenId GenUniverse::parse(std::string_view text) const {
  auto fail = [&] { throw Error(ErrorKind::ParseError, "bad generator '" + std::string(text) + "'"); };
  if (text.size() < 3 || text.front() != '(' || text.back() != ')') fail();
  auto body = text.substr(1, text.size() - 2);
  auto semi = body.find(';');
  if (semi == std::string_view::npos) fail();
  ChainGen g;
  for (const auto& name : detail::split(body.substr(0, semi), '>')) {
    auto id = poset_.find(name);
    if (!id) throw Error(ErrorKind::UnknownElement, name);
    g.tbar.push_back(*id);
  }
  for (char c : body.substr(semi + 1)) {
    if (c != '0' && c != '1') fail();
    g.eta.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  auto id = find(g);
  if (!id) fail();
  return *id;
}

std::uint64_t count_gens(const Poset& p) {
  // chains(t) = sum over decreasing chains starting at t of 2^n.
  const RankInfo info = rank(p);
  std::vector<ElemId> order(p.size());
  for (ElemId t = 0; t < p.size(); ++t) order[t] = t;
  std::sort(order.begin(), order.end(), [&](ElemId a, ElemId b) { return info.rk[a] < info.rk[b]; });
  std::vector<std::uint64_t> weight(p.size(), 0);
  std::uint64_t total = 0;
  for (ElemId t : order) {
    std::uint64_t w = 1;
    for (ElemId s : p.below(t)) w += 2 * weight[s];
    weight[t] = w;
    total += w;
  }
  return total;
}

UniversePtr enumerate_gens(const Poset& p, std::size_t cap) {
  if (const auto count = count_gens(p); count > cap)
    throw Error(ErrorKind::UniverseTooLarge,
                std::to_string(count) + " generators exceed cap " + std::to_string(cap));
  static std::atomic<std::uint64_t> next_id{1};
  auto u = std::make_shared<GenUniverse>();
  u->poset_ = p;
  u->ranks_ = rank(p);
  u->id_ = next_id++;

  std::vector<ElemId> chain;
  auto extend = [&](auto&& self) -> void {
    const std::size_t n = chain.size() - 1;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      ChainGen g{chain, std::vector<std::uint8_t>(n)};
      for (std::size_t i = 0; i < n; ++i) g.eta[i] = (bits >> (n - 1 - i)) & 1;
      u->gens_.push_back(std::move(g));
    }
    for (ElemId s : p.below(chain.back())) {
      chain.push_back(s);
      self(self);
      chain.pop_back();
    }
  };
  for (ElemId t = 0; t < p.size(); ++t) {
    chain = {t};
    extend(extend);
  }
  std::sort(u->gens_.begin(), u->gens_.end(), star_less);

  const std::size_t m = u->gens_.size();
  for (GenId x = 0; x < m; ++x) u->index_.emplace(u->gens_[x], x);
  u->rk1_.resize(m);
  u->rk2_.resize(m);
  u->restrict_.resize(m);
  u->flip_.resize(m);
  for (GenId x = 0; x < m; ++x) {
    const ChainGen& g = u->gens_[x];
    const int r = u->ranks_.rk[g.bottom()];
    u->rk1_[x] = r;
    const bool all_ones = std::all_of(g.eta.begin(), g.eta.end(), [](auto b) { return b == 1; });
    u->rk2_[x] = all_ones ? r : -1;
    for (int k = 0; k <= g.n(); ++k) u->restrict_[x].push_back(u->index_.at(restrict(g, k)));
    for (int k = 0; k < g.n(); ++k) {
      ChainGen f = g;
      f.eta[k] ^= 1;
      u->flip_[x].push_back(u->index_.at(f));
    }
  }
  return u;
}

}  // namespace nortower
