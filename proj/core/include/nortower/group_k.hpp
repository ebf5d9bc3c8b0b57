#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nortower/group_g.hpp"

namespace nortower {

// Element of the Boolean group on left cosets of G^{<0}; the product is
// symmetric difference and the empty set is the identity.
class LElement {
 public:
  LElement() = default;
  static LElement singleton(Coset c);

  const std::vector<Coset>& cosets() const noexcept { return cosets_; }
  bool empty() const noexcept { return cosets_.empty(); }
  std::size_t size() const noexcept { return cosets_.size(); }
  bool contains(const Coset& c) const;

  LElement sym_diff(const LElement& other) const;
  void toggle(const Coset& c);

  auto operator<=>(const LElement&) const = default;

 private:
  std::vector<Coset> cosets_;
};

struct KElement {
  GroupElement g;
  LElement h;
  auto operator<=>(const KElement&) const = default;
};

class GroupK {
 public:
  explicit GroupK(const GroupG& g) : g_(g) {}

  const GroupG& g_group() const noexcept { return g_; }

  KElement identity() const { return {g_.identity(), {}}; }
  KElement from_g(GroupElement g) const { return {std::move(g), {}}; }
  // (e, {w G^{<0}}).
  KElement from_coset_of(const GroupElement& w) const;
  KElement h_star() const { return from_coset_of(g_.identity()); }

  // {g a : a in h}.
  LElement act(const GroupElement& g, const LElement& h) const;
  KElement multiply(const KElement& p, const KElement& q) const;
  KElement inverse(const KElement& p) const;
  bool commutes(const KElement& p, const KElement& q) const;

  bool is_in_H(const KElement& p) const;
  bool in_level(const KElement& p, int alpha) const {
    return g_.in_level(p.g, alpha, LevelKind::Strict);
  }
  const GroupElement& project(const KElement& p) const { return p.g; }

  std::string render(const KElement& p) const;
  KElement parse(std::string_view text) const;

 private:
  const GroupG& g_;
};

}  // namespace nortower
