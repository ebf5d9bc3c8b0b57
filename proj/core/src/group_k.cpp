#include "nortower/group_k.hpp"

#include <algorithm>

#include "nortower/error.hpp"
#include "text.hpp"

namespace nortower {

LElement LElement::singleton(Coset c) {
  LElement h;
  h.cosets_.push_back(std::move(c));
  return h;
}

bool LElement::contains(const Coset& c) const {
  return std::binary_search(cosets_.begin(), cosets_.end(), c);
}

LElement LElement::sym_diff(const LElement& other) const {
  LElement out;
  std::set_symmetric_difference(cosets_.begin(), cosets_.end(), other.cosets_.begin(),
                                other.cosets_.end(), std::back_inserter(out.cosets_));
  return out;
}

void LElement::toggle(const Coset& c) {
  auto it = std::lower_bound(cosets_.begin(), cosets_.end(), c);
  if (it != cosets_.end() && *it == c)
    cosets_.erase(it);
  else
    cosets_.insert(it, c);
}

KElement GroupK::from_coset_of(const GroupElement& w) const {
  return {g_.identity(), LElement::singleton(g_.coset_of(w))};
}

LElement GroupK::act(const GroupElement& g, const LElement& h) const {
  LElement out;
  for (const Coset& a : h.cosets()) out.toggle(g_.coset_of(g_.multiply(g, a.rep)));
  return out;
}

KElement GroupK::multiply(const KElement& p, const KElement& q) const {
  // Conjugation by g acts on L as translation by g, hence the inverse here.
  return {g_.multiply(p.g, q.g), act(g_.inverse(q.g), p.h).sym_diff(q.h)};
}

KElement GroupK::inverse(const KElement& p) const {
  return {g_.inverse(p.g), act(p.g, p.h)};
}

bool GroupK::commutes(const KElement& p, const KElement& q) const {
  return multiply(p, q) == multiply(q, p);
}

bool GroupK::is_in_H(const KElement& p) const {
  return p.g.is_identity() && (p.h.empty() || p.h == h_star().h);
}

std::string GroupK::render(const KElement& p) const {
  std::string out = "(" + g_.render(p.g) + " | {";
  for (std::size_t i = 0; i < p.h.size(); ++i)
    out += (i ? ", " : "") + g_.render(p.h.cosets()[i].rep);
  return out + "})";
}

KElement GroupK::parse(std::string_view text) const {
  auto fail = [&] { throw Error(ErrorKind::ParseError, "bad K element '" + std::string(text) + "'"); };
  if (text.size() < 2 || text.front() != '(' || text.back() != ')') fail();
  auto body = text.substr(1, text.size() - 2);
  auto bar = body.find('|');
  if (bar == std::string_view::npos) fail();
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  KElement p{g_.parse(trim(body.substr(0, bar))), {}};
  auto set = trim(body.substr(bar + 1));
  if (set.size() < 2 || set.front() != '{' || set.back() != '}') fail();
  set = trim(set.substr(1, set.size() - 2));
  if (!set.empty())
    for (const auto& rep : detail::split(set, ','))
      p.h.toggle(g_.coset_of(g_.parse(trim(rep))));
  return p;
}

}  // namespace nortower
