#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "nortower/descriptors.hpp"

namespace nortower {

using NodeId = ElemId;

// Unvalidated system data as read from a file.
struct RawPowis {
  struct MapLine {
    std::string u, v, elem_v, elem_u;
  };
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> order;
  std::optional<std::string> limit;
  bool declared_nice = false;
  std::vector<std::pair<std::string, RawPoset>> posets;
  std::vector<MapLine> maps;
};

RawPowis parse_powis(std::string_view text);

// Directed index poset J, a poset per node and coherent partial projections
// pi(u, v): I_v -> I_u for u <= v.
class Powis {
 public:
  const Poset& index() const noexcept { return j_; }
  std::size_t size() const noexcept { return j_.size(); }
  const std::string& name(NodeId u) const { return j_.name(u); }
  std::optional<NodeId> find(std::string_view name) const { return j_.find(name); }
  bool le(NodeId u, NodeId v) const { return u == v || j_.less(u, v); }

  const Poset& poset(NodeId u) const { return posets_.at(u); }
  // Groups over I_u, built on first use.
  const Realization& realization(NodeId u) const;
  // pi(u, v)(x) for x in I_v; nullopt outside the domain. Requires u <= v.
  std::optional<ElemId> project(NodeId u, NodeId v, ElemId x) const;

  // Every projection is total.
  bool nice() const noexcept { return nice_; }
  std::optional<NodeId> limit() const noexcept { return limit_; }

  bool operator==(const Powis& other) const {
    return j_ == other.j_ && posets_ == other.posets_ && maps_ == other.maps_ &&
           limit_ == other.limit_;
  }

 private:
  friend Powis validate_powis(const RawPowis& raw, bool check_coherence);

  struct Cache;
  Poset j_;
  std::vector<Poset> posets_;
  // Keyed by (u, v) with u < v; -1 marks points outside the domain.
  std::map<std::pair<NodeId, NodeId>, std::vector<std::int64_t>> maps_;
  std::optional<NodeId> limit_;
  bool nice_ = true;
  std::shared_ptr<Cache> cache_;
};

struct Incoherence {
  NodeId u = 0, v = 0, w = 0;
  ElemId x = 0;
  std::string detail;
};

// First triple u <= v <= w and x in I_w where pi(u,w) differs from pi(u,v) after pi(v,w).
std::optional<Incoherence> find_incoherence(const Powis& s);

// NotDirected, IncoherentProjection (with the witness), PartialOnNice when the
// file declares niceness. check_coherence = false loads negative controls.
Powis validate_powis(const RawPowis& raw, bool check_coherence = true);
inline Powis load_powis(std::string_view text, bool check_coherence = true) {
  return validate_powis(parse_powis(text), check_coherence);
}
std::string format_powis(const Powis& s);

// A chain-shaped pair over I_u whose elements need not decrease.
struct Z0 {
  std::vector<ElemId> tbar;
  std::vector<std::uint8_t> eta;

  int n() const noexcept { return static_cast<int>(tbar.size()) - 1; }
  auto operator<=>(const Z0&) const = default;
};

// Z0 when !sequence (exactly one part), otherwise a finite sequence of Z0.
struct ZDescriptor {
  bool sequence = false;
  std::vector<Z0> parts;

  static ZDescriptor single(Z0 z) { return {false, {std::move(z)}}; }
  static ZDescriptor of(std::vector<Z0> zs) { return {true, std::move(zs)}; }
  auto operator<=>(const ZDescriptor&) const = default;
};

std::set<ElemId> his(const ZDescriptor& z);
int size_n(const ZDescriptor& z);
std::string render(const ZDescriptor& z, const Poset& p);

// Componentwise image under pi(u, v); nullopt when some element of his(z) is
// outside the domain.
std::optional<ZDescriptor> lift_pi(const Powis& s, NodeId u, NodeId v, const ZDescriptor& z);

// A tuple over I_u with a table; the multiplier at v is evaluated on the
// projected tuple.
struct TableParam {
  std::vector<ElemId> tuple;
  QMap q;
};

struct DeltaPerm {
  NodeId u = 0;
  std::variant<ZDescriptor, TableParam> z;
};

struct DPoint {
  NodeId v = 0;
  KElement g;
  auto operator<=>(const DPoint&) const = default;
};

enum class DeltaCase { Generator = 1, CosetProduct = 2, Fixed = 3, Table = 4 };

DeltaCase delta_case(const Powis& s, const DeltaPerm& perm, NodeId v);
// Left multiplication of pt.g inside K_v; NodeNotBelow unless pt.v <= perm.u.
DPoint delta_apply(const Powis& s, const DeltaPerm& perm, const DPoint& pt);

ZDescriptor random_z(const Poset& p, Rng& rng, bool sequence, std::size_t max_n,
                     std::size_t max_parts);
KElement random_k(const GroupK& k, Rng& rng, std::size_t max_letters = 6,
                  std::size_t max_cosets = 2);
DPoint random_dpoint(const Powis& s, NodeId u, Rng& rng);

struct CompatReport {
  std::size_t edges = 0;
  std::size_t points = 0;
  std::size_t undefined_lifts = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> witnesses;

  bool ok() const noexcept { return mismatches == 0; }
};

// For every edge u < v and each sample: random y over I_v with x = lift(y)
// defined, and a random point of D_u; the two permutations must agree.
CompatReport check_delta_compat(const Powis& s, std::size_t samples, std::uint64_t seed);

// The permutation of a generator or product written as a tuple with a table.
struct Encoding {
  std::vector<ElemId> tuple;
  QMap q;
};

Encoding encode_identity();
Encoding encode(const Powis& s, NodeId u, const ZDescriptor& z);
// The product acts as `first` after `second`. Needs combined arity <= 4.
Encoding encode_product(const Encoding& first, const Encoding& second);
Encoding encode_inverse(const Encoding& e);

struct ClosureReport {
  std::size_t witnesses = 0;
  std::size_t points = 0;
  std::size_t mismatches = 0;
  bool budget_exhausted = false;
  std::vector<std::string> failures;

  bool ok() const noexcept { return mismatches == 0; }
};

// Checks that identity, generators, products of two generators and inverses
// act as their encodings on every enumerated point of D_u, within `budget`
// points.
ClosureReport check_F_closure(const Powis& s, NodeId u, std::size_t budget, std::uint64_t seed);

struct ClauseVerdict {
  char clause = 'a';
  bool holds = true;
  std::string witness;
};

struct LimitReport {
  std::vector<ClauseVerdict> clauses;
  // Largest stabilization node needed for the order clause, by J-position.
  std::optional<NodeId> max_u_st;
  std::size_t threads = 0;

  bool ok() const;
  const ClauseVerdict& clause(char c) const;
};

// Clauses (a)-(e) with the system below vstar as the approximating system.
LimitReport check_limit(const Powis& s, NodeId vstar, std::size_t thread_budget = 1000000);

enum class ExVerdict { Satisfied, CounterexampleCandidate, BudgetExhausted };

struct ExLimitReport {
  ExVerdict verdict = ExVerdict::Satisfied;
  std::size_t instances = 0;
  std::size_t budget = 0;
  // Witness for the last instance examined: t, s and the node from which the
  // projected type stays in the required class.
  std::vector<ElemId> t, s;
  std::optional<NodeId> from;
  std::string detail;
};

// Bounded search over assumption instances (start node, equivalence on the
// realized types, tuple t over I_vstar, per-node witnesses s_v over I_v).
ExLimitReport check_existential_limit(const Powis& s, NodeId vstar, std::size_t k1,
                                      std::size_t k2, std::size_t budget);

struct FunctionFamily {
  std::size_t theta = 0;
  std::size_t kappa = 0;
  std::vector<std::vector<std::size_t>> functions;
  std::vector<std::set<std::size_t>> ideal;
};

FunctionFamily parse_funcs(std::string_view text);

struct BuildOptions {
  bool pad = true;
};

struct BuiltSystem {
  Powis system;
  NodeId limit = 0;
  std::vector<std::vector<std::size_t>> family;
};

// Nodes 0..theta-1 ordered by the value at that coordinate, projections by
// restriction, and a limit node ordered modulo the ideal. Padding adds the
// zero function and closes under +1 while values stay below kappa.
// NotAProperIdeal, PaddingOverflow, EmptyPoset.
BuiltSystem build_from_functions(const FunctionFamily& f, BuildOptions options = {});

}  // namespace nortower
