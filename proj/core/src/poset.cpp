#include "nortower/poset.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "nortower/error.hpp"
#include "nortower/random.hpp"
#include "text.hpp"

namespace nortower {

namespace {

// Returns a cycle in the edge relation as a vertex path, or empty.
std::vector<ElemId> find_cycle(std::size_t n,
                               const std::vector<std::vector<ElemId>>& succ) {
  std::vector<int> color(n, 0);
  std::vector<ElemId> stack;
  std::vector<ElemId> cycle;
  std::function<bool(ElemId)> dfs = [&](ElemId v) {
    color[v] = 1;
    stack.push_back(v);
    for (ElemId w : succ[v]) {
      if (color[w] == 1) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        cycle.push_back(w);
        return true;
      }
      if (color[w] == 0 && dfs(w)) return true;
    }
    stack.pop_back();
    color[v] = 2;
    return false;
  };
  for (ElemId v = 0; v < n; ++v)
    if (color[v] == 0 && dfs(v)) return cycle;
  return {};
}

}  // namespace

std::optional<ElemId> Poset::find(std::string_view name) const {
  for (ElemId i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::vector<std::pair<ElemId, ElemId>> Poset::lt_pairs() const {
  std::vector<std::pair<ElemId, ElemId>> out;
  for (ElemId a = 0; a < size(); ++a)
    for (ElemId b = 0; b < size(); ++b)
      if (less(a, b)) out.emplace_back(a, b);
  return out;
}

std::vector<std::pair<ElemId, ElemId>> Poset::hasse_pairs() const {
  std::vector<std::pair<ElemId, ElemId>> out;
  for (auto [a, b] : lt_pairs()) {
    bool covered = true;
    for (ElemId c = 0; c < size() && covered; ++c)
      if (less(a, c) && less(c, b)) covered = false;
    if (covered) out.emplace_back(a, b);
  }
  return out;
}

Poset Poset::induced(std::span<const ElemId> elems) const {
  std::vector<std::string> names;
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (ElemId i = 0; i < elems.size(); ++i) {
    names.push_back(name(elems[i]));
    for (ElemId j = 0; j < elems.size(); ++j)
      if (less(elems[i], elems[j])) lt.emplace_back(i, j);
  }
  return make_poset(std::move(names), lt);
}

Poset make_poset(std::vector<std::string> names,
                 const std::vector<std::pair<ElemId, ElemId>>& lt) {
  const std::size_t n = names.size();
  if (n == 0) throw Error(ErrorKind::EmptyPoset, "poset has no elements");
  {
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end())
      throw Error(ErrorKind::DuplicateElement, *it);
  }
  std::vector<std::vector<ElemId>> succ(n);
  for (auto [a, b] : lt) {
    if (a >= n || b >= n) throw Error(ErrorKind::UnknownElement, "element index out of range");
    succ[a].push_back(b);
  }
  if (auto cycle = find_cycle(n, succ); !cycle.empty()) {
    std::string msg;
    for (std::size_t i = 0; i < cycle.size(); ++i) msg += (i ? " < " : "") + names[cycle[i]];
    throw Error(ErrorKind::CycleDetected, msg);
  }
  Poset p;
  p.names_ = std::move(names);
  p.lt_.assign(n * n, 0);
  for (auto [a, b] : lt) p.lt_[a * n + b] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (p.lt_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (p.lt_[k * n + j]) p.lt_[i * n + j] = 1;
  p.below_.assign(n, {});
  for (ElemId t = 0; t < n; ++t)
    for (ElemId s = 0; s < n; ++s)
      if (p.lt_[s * n + t]) p.below_[t].push_back(s);
  return p;
}

Poset validate_poset(const RawPoset& raw) {
  if (raw.elements.empty()) throw Error(ErrorKind::EmptyPoset, "poset has no elements");
  std::map<std::string, ElemId> index;
  for (const auto& name : raw.elements) {
    if (!index.emplace(name, static_cast<ElemId>(index.size())).second)
      throw Error(ErrorKind::DuplicateElement, name);
  }
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (const auto& [a, b] : raw.lt) {
    auto ia = index.find(a);
    auto ib = index.find(b);
    if (ia == index.end()) throw Error(ErrorKind::UnknownElement, a);
    if (ib == index.end()) throw Error(ErrorKind::UnknownElement, b);
    lt.emplace_back(ia->second, ib->second);
  }
  return make_poset(raw.elements, lt);
}

RawPoset parse_poset(std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty() || lines.front().tokens != std::vector<std::string>{"poset"})
    detail::parse_fail(lines.empty() ? 1 : lines.front().number, "expected header 'poset'");
  RawPoset raw;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (tok[0] == "elem" && tok.size() == 2) {
      raw.elements.push_back(tok[1]);
    } else if (tok[0] == "lt" && tok.size() == 3) {
      raw.lt.emplace_back(tok[1], tok[2]);
    } else {
      detail::parse_fail(number, "unrecognized line '" + tok[0] + "'");
    }
  }
  return raw;
}

std::string format_poset(const Poset& p) {
  std::string out = "poset\n";
  for (const auto& name : p.names()) out += "elem " + name + "\n";
  for (auto [a, b] : p.hasse_pairs()) out += "lt " + p.name(a) + " " + p.name(b) + "\n";
  return out;
}

RankInfo rank(const Poset& p) {
  const std::size_t n = p.size();
  RankInfo info;
  info.rk.assign(n, -1);
  std::vector<ElemId> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Down-sets are closed, so every s < t has a strictly smaller down-set.
  std::stable_sort(order.begin(), order.end(), [&](ElemId a, ElemId b) {
    return p.below(a).size() < p.below(b).size();
  });
  for (ElemId t : order) {
    int r = 0;
    for (ElemId s : p.below(t)) r = std::max(r, info.rk[s] + 1);
    info.rk[t] = r;
  }

  // rk >= a+1 iff some s < t has rk >= a; iterate the descending sets.
  info.rk_inf.assign(n, 0);
  std::vector<std::uint8_t> at_least(n, 1);
  for (int alpha = 1;; ++alpha) {
    std::vector<std::uint8_t> next(n, 0);
    bool any = false;
    for (ElemId t = 0; t < n; ++t)
      for (ElemId s : p.below(t))
        if (at_least[s]) {
          next[t] = 1;
          any = true;
          break;
        }
    if (!any) break;
    for (ElemId t = 0; t < n; ++t)
      if (next[t]) info.rk_inf[t] = alpha;
    at_least = std::move(next);
  }
  if (info.rk_inf != info.rk)
    throw Error(ErrorKind::InvariantViolation, "recursive rank differs from fixpoint rank");

  info.rk_of_poset = 1 + *std::max_element(info.rk.begin(), info.rk.end());
  info.levels.assign(info.rk_of_poset, {});
  for (ElemId t = 0; t < n; ++t) info.levels[info.rk[t]].push_back(t);
  return info;
}

NontrivialityReport is_w_nontrivial(const Poset& p, std::size_t w) {
  const RankInfo info = rank(p);
  NontrivialityReport report;
  for (ElemId t = 0; t < p.size(); ++t) {
    for (int beta = 0; beta < info.rk_inf[t]; ++beta) {
      std::size_t at_least = info.rk[t] >= beta ? 1 : 0;
      std::size_t exact = info.rk[t] == beta ? 1 : 0;
      for (ElemId s : p.below(t)) {
        at_least += info.rk[s] >= beta;
        exact += info.rk[s] == beta;
      }
      if (at_least < w) report.failures.emplace_back(t, beta);
      if (exact < w) report.failures_exact_reading.emplace_back(t, beta);
    }
  }
  report.holds = report.failures.empty();
  report.holds_exact_reading = report.failures_exact_reading.empty();
  return report;
}

ExplicitReport is_explicitly_nontrivial_surrogate(const Poset& p, std::size_t w) {
  ExplicitReport report;
  std::map<std::vector<ElemId>, std::vector<ElemId>> by_down_set;
  for (ElemId t = 0; t < p.size(); ++t) by_down_set[p.below(t)].push_back(t);
  for (auto& [down, members] : by_down_set) report.classes.push_back(members);
  std::sort(report.classes.begin(), report.classes.end());
  report.holds = std::all_of(report.classes.begin(), report.classes.end(),
                             [&](const auto& c) { return c.size() >= w; });
  report.implication_holds = !report.holds || is_w_nontrivial(p, w).holds;
  return report;
}

QfType::QfType(std::size_t k, std::vector<std::uint8_t> codes)
    : k_(k), codes_(std::move(codes)) {
  if (codes_.size() != k_ * k_) throw Error(ErrorKind::InvalidArgument, "QfType needs k*k codes");
}

std::string QfType::render() const {
  static constexpr char kChars[] = {'<', '=', '>', '|'};
  std::string out;
  for (std::size_t a = 0; a < k_; ++a) {
    if (a) out += '/';
    for (std::size_t b = 0; b < k_; ++b) out += kChars[code(a, b)];
  }
  return out.empty() ? "-" : out;
}

QfType QfType::parse(std::string_view text) {
  if (text == "-") return QfType(0, {});
  auto rows = detail::split(text, '/');
  const std::size_t k = rows.size();
  std::vector<std::uint8_t> codes;
  for (const auto& row : rows) {
    if (row.size() != k) throw Error(ErrorKind::ParseError, "ragged type '" + std::string(text) + "'");
    for (char c : row) {
      switch (c) {
        case '<': codes.push_back(0); break;
        case '=': codes.push_back(1); break;
        case '>': codes.push_back(2); break;
        case '|': codes.push_back(3); break;
        default: throw Error(ErrorKind::ParseError, "bad type code '" + std::string(1, c) + "'");
      }
    }
  }
  QfType t(k, std::move(codes));
  if (!t.consistent()) throw Error(ErrorKind::ParseError, "inconsistent type '" + std::string(text) + "'");
  return t;
}

bool QfType::consistent() const {
  static constexpr std::uint8_t kMirror[] = {2, 1, 0, 3};
  for (std::size_t a = 0; a < k_; ++a) {
    if (code(a, a) != 1) return false;
    for (std::size_t b = 0; b < k_; ++b) {
      if (code(a, b) > 3 || code(b, a) != kMirror[code(a, b)]) return false;
      for (std::size_t c = 0; c < k_; ++c) {
        const auto ab = code(a, b), bc = code(b, c), ac = code(a, c);
        if (ab == 1 && ac != bc) return false;
        if (ab == 0 && bc == 0 && ac != 0) return false;
      }
    }
  }
  return true;
}

QfType QfType::restrict(std::span<const std::size_t> indices) const {
  std::vector<std::uint8_t> codes;
  for (auto a : indices)
    for (auto b : indices) codes.push_back(code(a, b));
  return QfType(indices.size(), std::move(codes));
}

QfType qf_type(std::span<const ElemId> tuple, const Poset& p) {
  const std::size_t k = tuple.size();
  for (ElemId t : tuple)
    if (t >= p.size()) throw Error(ErrorKind::UnknownElement, "element index " + std::to_string(t));
  std::vector<std::uint8_t> codes(k * k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) {
      const ElemId x = tuple[a], y = tuple[b];
      codes[a * k + b] = x == y ? 1 : p.less(x, y) ? 0 : p.less(y, x) ? 2 : 3;
    }
  return QfType(k, std::move(codes));
}

QfType qf_type(std::span<const std::string> tuple, const Poset& p) {
  std::vector<ElemId> ids;
  for (const auto& name : tuple) {
    auto id = p.find(name);
    if (!id) throw Error(ErrorKind::UnknownElement, name);
    ids.push_back(*id);
  }
  return qf_type(ids, p);
}

Poset make_wide_poset(std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) throw Error(ErrorKind::InvalidArgument, "wide poset needs m, n >= 1");
  std::vector<std::string> names;
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (std::size_t j = 0; j < n; ++j) names.push_back("s" + std::to_string(j));
  for (std::size_t i = 0; i < m; ++i) {
    names.push_back("t" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j)
      lt.emplace_back(static_cast<ElemId>(j), static_cast<ElemId>(n + i));
  }
  return make_poset(std::move(names), lt);
}

Poset make_chain(std::size_t n) {
  std::vector<std::string> names;
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back("c" + std::to_string(i));
    if (i) lt.emplace_back(static_cast<ElemId>(i - 1), static_cast<ElemId>(i));
  }
  return make_poset(std::move(names), lt);
}

Poset make_antichain(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("a" + std::to_string(i));
  return make_poset(std::move(names), {});
}

Poset random_poset(std::uint64_t seed, std::size_t n, double density) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "random poset needs n >= 1");
  Rng rng(seed);
  std::vector<std::string> names;
  std::vector<std::pair<ElemId, ElemId>> lt;
  for (std::size_t i = 0; i < n; ++i) names.push_back("p" + std::to_string(i));
  for (ElemId i = 0; i < n; ++i)
    for (ElemId j = i + 1; j < n; ++j)
      if (rng.chance(density)) lt.emplace_back(i, j);
  return make_poset(std::move(names), lt);
}

}  // namespace nortower
