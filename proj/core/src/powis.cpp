#include "nortower/powis.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <numeric>
#include <tuple>

#include "nortower/error.hpp"
#include "text.hpp"

namespace nortower {

struct Powis::Cache {
  std::mutex mutex;
  std::vector<std::unique_ptr<Realization>> realizations;
};

namespace {

std::string join_names(const Poset& p, std::span<const ElemId> xs) {
  std::string out = "<";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + p.name(xs[i]);
  return out + ">";
}

bool decreasing(const Z0& z, const Poset& p) {
  for (std::size_t i = 0; i + 1 < z.tbar.size(); ++i)
    if (!p.less(z.tbar[i + 1], z.tbar[i])) return false;
  return true;
}

void check_shape(const Z0& z, const Poset& p) {
  if (z.tbar.empty() || z.eta.size() + 1 != z.tbar.size())
    throw Error(ErrorKind::InvalidArgument, "Z0 needs one bit fewer than elements");
  for (ElemId e : z.tbar)
    if (e >= p.size()) throw Error(ErrorKind::IndexOutOfRange, "element outside the node poset");
}

void require_below(const Powis& s, NodeId u, NodeId v) {
  if (!s.le(u, v)) throw Error(ErrorKind::NodeNotBelow, s.name(u) + " is not below " + s.name(v));
}

std::vector<NodeId> nodes_above(const Powis& s, NodeId w, std::optional<NodeId> skip) {
  std::vector<NodeId> out;
  for (NodeId u = 0; u < s.size(); ++u)
    if (u != skip && s.le(w, u)) out.push_back(u);
  return out;
}

// Nodes with more nodes below come later.
std::size_t depth(const Powis& s, NodeId u) { return s.index().below(u).size(); }

std::optional<std::vector<ElemId>> project_tuple(const Powis& s, NodeId u, NodeId v,
                                                 std::span<const ElemId> t) {
  std::vector<ElemId> out;
  for (ElemId x : t) {
    auto y = s.project(u, v, x);
    if (!y) return std::nullopt;
    out.push_back(*y);
  }
  return out;
}

const TypeCatalog& catalog(std::size_t k) {
  static std::mutex mutex;
  static std::map<std::size_t, TypeCatalog> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, enumerate_qf_types(k)).first;
  return it->second;
}

// Calls fn on every tuple in [0, n)^k; stops when fn returns false.
bool for_each_tuple(std::size_t n, std::size_t k, const std::function<bool(const std::vector<ElemId>&)>& fn) {
  std::vector<ElemId> t(k, 0);
  if (n == 0 && k > 0) return true;
  while (true) {
    if (!fn(t)) return false;
    std::size_t pos = k;
    while (pos > 0 && t[pos - 1] + 1 == n) t[--pos] = 0;
    if (pos == 0) return true;
    ++t[pos - 1];
  }
}

}  // namespace

RawPowis parse_powis(std::string_view text) {
  const auto lines = detail::tokenize(text);
  if (lines.empty() || lines.front().tokens != std::vector<std::string>{"powis"})
    detail::parse_fail(lines.empty() ? 1 : lines.front().number, "expected header 'powis'");
  RawPowis raw;
  RawPoset* block = nullptr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (block) {
      if (tok[0] == "end" && tok.size() == 1) {
        block = nullptr;
      } else if (tok[0] == "elem" && tok.size() == 2) {
        block->elements.push_back(tok[1]);
      } else if (tok[0] == "lt" && tok.size() == 3) {
        block->lt.emplace_back(tok[1], tok[2]);
      } else if (tok[0] != "poset" || tok.size() != 1) {
        detail::parse_fail(number, "unrecognized line in poset block '" + tok[0] + "'");
      }
      continue;
    }
    if (tok[0] == "node" && tok.size() == 2) {
      raw.nodes.push_back(tok[1]);
    } else if (tok[0] == "order" && tok.size() == 3) {
      raw.order.emplace_back(tok[1], tok[2]);
    } else if (tok[0] == "limit" && tok.size() == 2) {
      raw.limit = tok[1];
    } else if (tok[0] == "nice" && tok.size() == 1) {
      raw.declared_nice = true;
    } else if (tok[0] == "begin" && tok.size() == 3 && tok[1] == "poset") {
      raw.posets.emplace_back(tok[2], RawPoset{});
      block = &raw.posets.back().second;
    } else if (tok[0] == "map" && tok.size() == 5) {
      raw.maps.push_back({tok[1], tok[2], tok[3], tok[4]});
    } else {
      detail::parse_fail(number, "unrecognized line '" + tok[0] + "'");
    }
  }
  if (block) detail::parse_fail(lines.back().number, "unterminated poset block");
  return raw;
}

const Realization& Powis::realization(NodeId u) const {
  std::lock_guard lock(cache_->mutex);
  auto& slot = cache_->realizations.at(u);
  if (!slot) slot = std::make_unique<Realization>(posets_.at(u));
  return *slot;
}

std::optional<ElemId> Powis::project(NodeId u, NodeId v, ElemId x) const {
  if (u == v) return x;
  auto it = maps_.find({u, v});
  if (it == maps_.end()) throw Error(ErrorKind::NodeNotBelow, name(u) + " is not below " + name(v));
  const std::int64_t y = it->second.at(x);
  if (y < 0) return std::nullopt;
  return static_cast<ElemId>(y);
}

std::optional<Incoherence> find_incoherence(const Powis& s) {
  auto show = [&](NodeId u, std::optional<ElemId> y) {
    return y ? s.poset(u).name(*y) : std::string("undefined");
  };
  for (NodeId w = 0; w < s.size(); ++w)
    for (NodeId v : s.index().below(w))
      for (NodeId u : s.index().below(v))
        for (ElemId x = 0; x < s.poset(w).size(); ++x) {
          const auto direct = s.project(u, w, x);
          const auto mid = s.project(v, w, x);
          const auto via = mid ? s.project(u, v, *mid) : std::nullopt;
          if (direct != via)
            return Incoherence{u, v, w, x,
                               "pi(" + s.name(u) + "," + s.name(w) + ")(" + s.poset(w).name(x) + ")=" +
                                   show(u, direct) + " but through " + s.name(v) + " gives " + show(u, via)};
        }
  return std::nullopt;
}

Powis validate_powis(const RawPowis& raw, bool check_coherence) {
  Powis s;
  RawPoset jraw{raw.nodes, {}};
  for (const auto& [a, b] : raw.order)
    if (a != b) jraw.lt.emplace_back(a, b);
  s.j_ = validate_poset(jraw);
  for (NodeId a = 0; a < s.size(); ++a)
    for (NodeId b = a + 1; b < s.size(); ++b) {
      bool bounded = false;
      for (NodeId c = 0; c < s.size() && !bounded; ++c) bounded = s.le(a, c) && s.le(b, c);
      if (!bounded) throw Error(ErrorKind::NotDirected, s.name(a) + " and " + s.name(b) + " have no upper bound");
    }

  std::vector<std::optional<Poset>> posets(s.size());
  for (const auto& [node, rp] : raw.posets) {
    auto u = s.find(node);
    if (!u) throw Error(ErrorKind::UnknownElement, "node " + node);
    if (posets[*u]) throw Error(ErrorKind::DuplicateElement, "second poset for node " + node);
    posets[*u] = validate_poset(rp);
  }
  for (NodeId u = 0; u < s.size(); ++u) {
    if (!posets[u]) throw Error(ErrorKind::InvalidArgument, "node " + s.name(u) + " has no poset");
    s.posets_.push_back(std::move(*posets[u]));
  }

  for (NodeId v = 0; v < s.size(); ++v)
    for (NodeId u : s.j_.below(v)) s.maps_[{u, v}].assign(s.posets_[v].size(), -1);
  for (const auto& line : raw.maps) {
    auto u = s.find(line.u), v = s.find(line.v);
    if (!u || !v) throw Error(ErrorKind::UnknownElement, "node in map line " + line.u + " " + line.v);
    require_below(s, *u, *v);
    auto x = s.posets_[*v].find(line.elem_v);
    auto y = s.posets_[*u].find(line.elem_u);
    if (!x) throw Error(ErrorKind::UnknownElement, line.elem_v + " in node " + line.v);
    if (!y) throw Error(ErrorKind::UnknownElement, line.elem_u + " in node " + line.u);
    if (*u == *v) {
      if (*x != *y)
        throw Error(ErrorKind::IncoherentProjection,
                    "pi(" + line.u + "," + line.u + ") moves " + line.elem_v + "; it must be the identity");
      continue;
    }
    auto& slot = s.maps_[{*u, *v}][*x];
    if (slot >= 0 && slot != *y)
      throw Error(ErrorKind::ParseError, "two images for " + line.elem_v + " under pi(" + line.u + "," + line.v + ")");
    slot = *y;
  }

  std::string partial;
  for (const auto& [key, image] : s.maps_)
    for (std::size_t x = 0; x < image.size(); ++x)
      if (image[x] < 0 && partial.empty())
        partial = "pi(" + s.name(key.first) + "," + s.name(key.second) + ") misses " +
                  s.posets_[key.second].name(static_cast<ElemId>(x));
  s.nice_ = partial.empty();
  if (raw.declared_nice && !s.nice_) throw Error(ErrorKind::PartialOnNice, partial);

  if (raw.limit) {
    s.limit_ = s.find(*raw.limit);
    if (!s.limit_) throw Error(ErrorKind::UnknownElement, "limit node " + *raw.limit);
  }
  s.cache_ = std::make_shared<Powis::Cache>();
  s.cache_->realizations.resize(s.size());
  if (check_coherence)
    if (auto bad = find_incoherence(s)) throw Error(ErrorKind::IncoherentProjection, bad->detail);
  return s;
}

std::string format_powis(const Powis& s) {
  std::string out = "powis\n";
  for (NodeId u = 0; u < s.size(); ++u) out += "node " + s.name(u) + "\n";
  for (auto [a, b] : s.index().hasse_pairs()) out += "order " + s.name(a) + " " + s.name(b) + "\n";
  if (s.limit()) out += "limit " + s.name(*s.limit()) + "\n";
  if (s.nice()) out += "nice\n";
  for (NodeId u = 0; u < s.size(); ++u) {
    out += "begin poset " + s.name(u) + "\n";
    const std::string body = format_poset(s.poset(u));
    out += body.substr(body.find('\n') + 1);
    out += "end\n";
  }
  for (NodeId v = 0; v < s.size(); ++v)
    for (NodeId u : s.index().below(v))
      for (ElemId x = 0; x < s.poset(v).size(); ++x)
        if (auto y = s.project(u, v, x))
          out += "map " + s.name(u) + " " + s.name(v) + " " + s.poset(v).name(x) + " " +
                 s.poset(u).name(*y) + "\n";
  return out;
}

std::set<ElemId> his(const ZDescriptor& z) {
  std::set<ElemId> out;
  for (const Z0& part : z.parts) out.insert(part.tbar.begin(), part.tbar.end());
  return out;
}

int size_n(const ZDescriptor& z) {
  int n = 0;
  for (const Z0& part : z.parts) n += part.n();
  return n;
}

std::string render(const ZDescriptor& z, const Poset& p) {
  std::string out = z.sequence ? "[" : "";
  for (std::size_t i = 0; i < z.parts.size(); ++i) {
    if (i) out += ' ';
    out += '(' + join_names(p, z.parts[i].tbar) + ';';
    for (auto bit : z.parts[i].eta) out += static_cast<char>('0' + bit);
    out += ')';
  }
  return out + (z.sequence ? "]" : "");
}

std::optional<ZDescriptor> lift_pi(const Powis& s, NodeId u, NodeId v, const ZDescriptor& z) {
  require_below(s, u, v);
  ZDescriptor out{z.sequence, {}};
  for (const Z0& part : z.parts) {
    auto tbar = project_tuple(s, u, v, part.tbar);
    if (!tbar) return std::nullopt;
    out.parts.push_back(Z0{std::move(*tbar), part.eta});
  }
  return out;
}

DeltaCase delta_case(const Powis& s, const DeltaPerm& perm, NodeId v) {
  require_below(s, v, perm.u);
  if (const auto* table = std::get_if<TableParam>(&perm.z))
    return project_tuple(s, v, perm.u, table->tuple) ? DeltaCase::Table : DeltaCase::Fixed;
  const auto& z = std::get<ZDescriptor>(perm.z);
  for (const Z0& part : z.parts) check_shape(part, s.poset(perm.u));
  if (!z.sequence && z.parts.size() != 1)
    throw Error(ErrorKind::InvalidArgument, "a single Z0 has exactly one part");
  const auto lifted = lift_pi(s, v, perm.u, z);
  if (!lifted) return DeltaCase::Fixed;
  const Poset& p = s.poset(v);
  const bool all = std::all_of(lifted->parts.begin(), lifted->parts.end(),
                               [&](const Z0& part) { return decreasing(part, p); });
  if (!all) return DeltaCase::Fixed;
  return z.sequence ? DeltaCase::CosetProduct : DeltaCase::Generator;
}

DPoint delta_apply(const Powis& s, const DeltaPerm& perm, const DPoint& pt) {
  const DeltaCase c = delta_case(s, perm, pt.v);
  if (c == DeltaCase::Fixed) return pt;
  const Realization& r = s.realization(pt.v);
  const GroupG& g = r.g();
  const GroupK& k = r.k();
  if (c == DeltaCase::Table) {
    const auto& table = std::get<TableParam>(perm.z);
    const auto t = *project_tuple(s, pt.v, perm.u, table.tuple);
    return {pt.v, k.multiply(eval_qmap(t, table.q, k), pt.g)};
  }
  const ZDescriptor lifted = *lift_pi(s, pt.v, perm.u, std::get<ZDescriptor>(perm.z));
  std::vector<GenId> word;
  for (const Z0& part : lifted.parts) {
    auto id = g.universe().find(ChainGen{part.tbar, part.eta});
    if (!id) throw Error(ErrorKind::InvariantViolation, "decreasing chain missing from universe");
    word.push_back(*id);
  }
  const GroupElement product = g.from_word(word);
  const KElement factor = c == DeltaCase::Generator ? k.from_g(product) : k.from_coset_of(product);
  return {pt.v, k.multiply(factor, pt.g)};
}

ZDescriptor random_z(const Poset& p, Rng& rng, bool sequence, std::size_t max_n,
                     std::size_t max_parts) {
  auto one = [&] {
    Z0 z;
    z.tbar.push_back(static_cast<ElemId>(rng.below(p.size())));
    const std::size_t n = rng.below(max_n + 1);
    const bool chain = rng.chance(0.7);
    while (z.tbar.size() <= n) {
      const auto& lower = p.below(z.tbar.back());
      if (chain && !lower.empty())
        z.tbar.push_back(lower[rng.below(lower.size())]);
      else
        z.tbar.push_back(static_cast<ElemId>(rng.below(p.size())));
      z.eta.push_back(static_cast<std::uint8_t>(rng.below(2)));
    }
    return z;
  };
  if (!sequence) return ZDescriptor::single(one());
  ZDescriptor z{true, {}};
  const std::size_t parts = rng.below(max_parts + 1);
  for (std::size_t i = 0; i < parts; ++i) z.parts.push_back(one());
  return z;
}

KElement random_k(const GroupK& k, Rng& rng, std::size_t max_letters, std::size_t max_cosets) {
  const GroupG& g = k.g_group();
  const std::size_t gens = g.universe().size();
  auto word = [&](std::size_t len) {
    std::vector<GenId> w(len);
    for (auto& x : w) x = static_cast<GenId>(rng.below(gens));
    return g.from_word(w);
  };
  KElement out = k.from_g(word(rng.below(max_letters + 1)));
  const std::size_t cosets = rng.below(max_cosets + 1);
  for (std::size_t i = 0; i < cosets; ++i)
    out = k.multiply(out, k.from_coset_of(word(rng.below(max_letters + 1))));
  return out;
}

DPoint random_dpoint(const Powis& s, NodeId u, Rng& rng) {
  std::vector<NodeId> below = s.index().below(u);
  below.push_back(u);
  const NodeId v = below[rng.below(below.size())];
  return {v, random_k(s.realization(v).k(), rng)};
}

CompatReport check_delta_compat(const Powis& s, std::size_t samples, std::uint64_t seed) {
  CompatReport report;
  Rng rng(seed);
  for (NodeId v = 0; v < s.size(); ++v)
    for (NodeId u : s.index().below(v)) {
      ++report.edges;
      std::size_t done = 0;
      for (std::size_t attempt = 0; done < samples && attempt < 8 * samples; ++attempt) {
        const ZDescriptor y = random_z(s.poset(v), rng, rng.chance(0.5), 2, 3);
        const auto x = lift_pi(s, u, v, y);
        if (!x) {
          ++report.undefined_lifts;
          continue;
        }
        const DPoint pt = random_dpoint(s, u, rng);
        ++done;
        ++report.points;
        const DPoint a = delta_apply(s, DeltaPerm{u, *x}, pt);
        const DPoint b = delta_apply(s, DeltaPerm{v, y}, pt);
        if (!s.le(pt.v, v) || a != b) {
          ++report.mismatches;
          if (report.witnesses.size() < 5)
            report.witnesses.push_back("edge " + s.name(u) + "<" + s.name(v) + " y=" + render(y, s.poset(v)) +
                                       " at node " + s.name(pt.v) + ": " +
                                       s.realization(pt.v).k().render(a.g) + " vs " +
                                       s.realization(pt.v).k().render(b.g));
        }
      }
    }
  return report;
}

Encoding encode_identity() {
  return {{}, make_qmap(catalog(0), [](const QfType&) { return Descriptor2{0, {Descriptor0{0, {}}}}; })};
}

Encoding encode(const Powis& s, NodeId u, const ZDescriptor& z) {
  for (const Z0& part : z.parts) check_shape(part, s.poset(u));
  Encoding e;
  if (z.sequence && z.parts.empty()) {
    // The empty product names the coset of e, written with a word of value e.
    e.tuple = {0};
    e.q = make_qmap(catalog(1), [](const QfType&) { return parse_descriptor2("-||(0|);(0|)", 1); });
    return e;
  }
  std::vector<std::pair<Index, Index>> spans;
  for (const Z0& part : z.parts) {
    spans.emplace_back(static_cast<Index>(e.tuple.size()), static_cast<Index>(part.tbar.size()));
    e.tuple.insert(e.tuple.end(), part.tbar.begin(), part.tbar.end());
  }
  const std::size_t k = e.tuple.size();
  e.q = make_qmap(catalog(k), [&](const QfType& p) {
    Descriptor0 items{k, {}};
    bool all = true;
    for (std::size_t j = 0; j < spans.size(); ++j) {
      const auto [start, len] = spans[j];
      Item item;
      for (Index i = 0; i < len; ++i) item.lbar.push_back(start + i);
      item.eta = z.parts[j].eta;
      all = all && item_decreasing(item, p);
      items.items.push_back(std::move(item));
    }
    Descriptor2 d{k, {Descriptor0{k, {}}}};
    if (!all) return d;
    if (z.sequence)
      d.parts.push_back(std::move(items));
    else
      d.parts[0] = std::move(items);
    return d;
  });
  return e;
}

Encoding encode_product(const Encoding& first, const Encoding& second) {
  Encoding e;
  e.tuple = first.tuple;
  e.tuple.insert(e.tuple.end(), second.tuple.begin(), second.tuple.end());
  e.q = compose(first.q, second.q, catalog(e.tuple.size()));
  return e;
}

Encoding encode_inverse(const Encoding& e) { return {e.tuple, inverse(e.q)}; }

ClosureReport check_F_closure(const Powis& s, NodeId u, std::size_t budget, std::uint64_t seed) {
  ClosureReport report;
  Rng rng(seed);
  std::vector<DPoint> points;
  std::vector<NodeId> below = s.index().below(u);
  below.push_back(u);
  for (NodeId v : below)
    for (int i = 0; i < 48; ++i) points.push_back({v, random_k(s.realization(v).k(), rng)});

  // agrees(pt, image) decides whether the encoding's image of pt is right.
  using Agrees = std::function<bool(const DPoint&, const DPoint&)>;
  auto check = [&](const std::string& label, const Encoding& e, const Agrees& agrees) {
    if (report.budget_exhausted) return;
    ++report.witnesses;
    const DeltaPerm perm{u, TableParam{e.tuple, e.q}};
    for (const DPoint& pt : points) {
      if (report.points >= budget) {
        report.budget_exhausted = true;
        return;
      }
      ++report.points;
      if (!agrees(pt, delta_apply(s, perm, pt))) {
        ++report.mismatches;
        if (report.failures.size() < 5) report.failures.push_back(label + " at node " + s.name(pt.v));
      }
    }
  };
  using Action = std::function<DPoint(const DPoint&)>;
  auto same_as = [](Action act) {
    return [act](const DPoint& pt, const DPoint& image) { return act(pt) == image; };
  };
  auto perm_of = [&](const ZDescriptor& z) {
    return [&s, u, z](const DPoint& pt) { return delta_apply(s, DeltaPerm{u, z}, pt); };
  };
  const Poset& p = s.poset(u);
  auto small_z = [&](std::size_t max_k) {
    // Tuple length of the encoding stays within max_k.
    while (true) {
      const bool seq = rng.chance(0.4);
      ZDescriptor z = random_z(p, rng, seq, 1, 2);
      std::size_t k = 0;
      for (const Z0& part : z.parts) k += part.tbar.size();
      if (seq && z.parts.empty()) k = 1;
      if (k <= max_k) return z;
    }
  };

  check("identity", encode_identity(), same_as([](const DPoint& pt) { return pt; }));
  for (int i = 0; i < 8; ++i) {
    const ZDescriptor z = small_z(3);
    check("generator " + render(z, p), encode(s, u, z), same_as(perm_of(z)));
  }
  for (int i = 0; i < 8; ++i) {
    const ZDescriptor z1 = small_z(2), z2 = small_z(2);
    const auto f1 = perm_of(z1), f2 = perm_of(z2);
    check("product " + render(z1, p) + " " + render(z2, p),
          encode_product(encode(s, u, z1), encode(s, u, z2)),
          same_as([&](const DPoint& pt) { return f1(f2(pt)); }));
  }
  for (int i = 0; i < 4; ++i) {
    const ZDescriptor z = small_z(3);
    const auto f = perm_of(z);
    check("inverse " + render(z, p), encode_inverse(encode(s, u, z)),
          [&](const DPoint& pt, const DPoint& image) { return f(image) == pt; });
  }
  return report;
}

bool LimitReport::ok() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseVerdict& c) { return c.holds; });
}

const ClauseVerdict& LimitReport::clause(char c) const {
  for (const auto& v : clauses)
    if (v.clause == c) return v;
  throw Error(ErrorKind::InvalidArgument, std::string("no clause ") + c);
}

LimitReport check_limit(const Powis& s, NodeId vstar, std::size_t thread_budget) {
  LimitReport report;
  const Poset& top = s.poset(vstar);
  std::vector<NodeId> rest;
  for (NodeId u = 0; u < s.size(); ++u)
    if (u != vstar) rest.push_back(u);

  ClauseVerdict a{'a', true, {}};
  for (NodeId u : rest)
    if (!s.le(u, vstar)) {
      a = {'a', false, s.name(u) + " is not below " + s.name(vstar)};
      break;
    }
  report.clauses.push_back(a);
  // The approximating system is the literal restriction.
  report.clauses.push_back({'b', true, {}});
  if (!a.holds) {
    for (char c : {'c', 'd', 'e'}) report.clauses.push_back({c, false, "clause (a) fails"});
    return report;
  }

  ClauseVerdict c{'c', true, {}};
  for (ElemId t = 0; t < top.size() && c.holds; ++t) {
    bool found = rest.empty();
    for (NodeId u : rest) {
      bool all = true;
      for (NodeId v : nodes_above(s, u, vstar)) all = all && s.project(v, vstar, t).has_value();
      if (all) found = true;
    }
    if (!found) c = {'c', false, "no capturing node for " + top.name(t)};
  }
  report.clauses.push_back(c);

  ClauseVerdict d{'d', true, {}};
  for (ElemId x = 0; x < top.size() && d.holds; ++x)
    for (ElemId y = 0; y < top.size() && d.holds; ++y) {
      if (rest.empty()) break;
      std::optional<NodeId> best;
      for (NodeId u : rest) {
        bool stable = true;
        for (NodeId v : nodes_above(s, u, vstar)) {
          const auto px = s.project(v, vstar, x), py = s.project(v, vstar, y);
          stable = stable && top.less(x, y) == (px && py && s.poset(v).less(*px, *py));
        }
        if (stable && (!best || depth(s, u) < depth(s, *best))) best = u;
      }
      if (!best) {
        d = {'d', false, "order of " + top.name(x) + "," + top.name(y) + " never stabilizes"};
      } else if (!report.max_u_st || depth(s, *best) > depth(s, *report.max_u_st)) {
        report.max_u_st = best;
      }
    }
  report.clauses.push_back(d);

  ClauseVerdict e{'e', true, {}};
  for (NodeId w : rest) {
    std::vector<NodeId> up = nodes_above(s, w, vstar);
    std::sort(up.begin(), up.end(), [&](NodeId p, NodeId q) { return depth(s, p) > depth(s, q); });
    std::vector<ElemId> thread(s.size());
    std::function<void(std::size_t)> extend = [&](std::size_t i) {
      if (!e.holds || report.threads > thread_budget) return;
      if (i == up.size()) {
        ++report.threads;
        std::size_t preimages = 0;
        for (ElemId t = 0; t < top.size(); ++t) {
          bool match = true;
          for (NodeId u : up) match = match && s.project(u, vstar, t) == std::optional<ElemId>(thread[u]);
          preimages += match;
        }
        if (preimages != 1) {
          std::string shown;
          for (NodeId u : up) shown += " " + s.name(u) + ":" + s.poset(u).name(thread[u]);
          e = {'e', false, "thread from " + s.name(w) + shown + " has " + std::to_string(preimages) + " preimages"};
        }
        return;
      }
      const NodeId u = up[i];
      for (ElemId x = 0; x < s.poset(u).size(); ++x) {
        bool coherent = true;
        for (std::size_t j = 0; j < i && coherent; ++j)
          if (s.le(u, up[j])) coherent = s.project(u, up[j], thread[up[j]]) == std::optional<ElemId>(x);
        if (!coherent) continue;
        thread[u] = x;
        extend(i + 1);
      }
    };
    extend(0);
  }
  if (report.threads > thread_budget) e = {'e', false, "thread budget exhausted"};
  report.clauses.push_back(e);
  return report;
}

ExLimitReport check_existential_limit(const Powis& s, NodeId vstar, std::size_t k1,
                                      std::size_t k2, std::size_t budget) {
  ExLimitReport report;
  report.budget = budget;
  if (k2 == 0) return report;
  const std::size_t k = k1 + k2;
  if (k > 4) throw Error(ErrorKind::ArityTooLarge, "existential check is limited to k1 + k2 <= 4");
  const Poset& top = s.poset(vstar);
  std::vector<NodeId> rest;
  for (NodeId u = 0; u < s.size(); ++u)
    if (u != vstar) rest.push_back(u);

  // Types realized in the approximating system, numbered.
  std::map<QfType, std::size_t> types;
  for (NodeId u : rest)
    for_each_tuple(s.poset(u).size(), k, [&](const std::vector<ElemId>& t) {
      types.emplace(qf_type(t, s.poset(u)), 0);
      return true;
    });
  std::size_t n_types = 0;
  for (auto& [type, id] : types) id = n_types++;

  // Set partitions of the realized types as restricted growth strings.
  std::vector<std::vector<std::size_t>> partitions;
  std::vector<std::size_t> rgs(n_types, 0);
  std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t i, std::size_t blocks) {
    if (i == n_types) {
      partitions.push_back(rgs);
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      rgs[i] = b;
      grow(i + 1, std::max(blocks, b + 1));
    }
  };
  grow(0, 0);

  auto class_of = [&](const std::vector<std::size_t>& part, const QfType& p) -> std::optional<std::size_t> {
    auto it = types.find(p);
    if (it == types.end()) return std::nullopt;
    return part[it->second];
  };
  auto type_at = [&](NodeId u, NodeId v, std::span<const ElemId> tv, std::span<const ElemId> sv)
      -> std::optional<QfType> {
    auto a = project_tuple(s, u, vstar, tv);
    auto b = project_tuple(s, u, v, sv);
    if (!a || !b) return std::nullopt;
    a->insert(a->end(), b->begin(), b->end());
    return qf_type(*a, s.poset(u));
  };

  for (NodeId ustar : rest) {
    const std::vector<NodeId> up = nodes_above(s, ustar, vstar);
    const bool done = !for_each_tuple(top.size(), k1, [&](const std::vector<ElemId>& t) {
      // Per-node witnesses s_v, one per node of `up`.
      std::vector<std::vector<ElemId>> family(up.size(), std::vector<ElemId>(k2, 0));
      std::function<bool(std::size_t)> pick = [&](std::size_t i) -> bool {
        if (i < up.size())
          return for_each_tuple(s.poset(up[i]).size(), k2, [&](const std::vector<ElemId>& sv) {
            family[i] = sv;
            return pick(i + 1);
          });
        // Types tp(t^u ^ pi(u,v)(s_v)) for u <= v in up.
        std::vector<std::vector<std::optional<QfType>>> tp(up.size(), std::vector<std::optional<QfType>>(up.size()));
        for (std::size_t a = 0; a < up.size(); ++a)
          for (std::size_t b = 0; b < up.size(); ++b)
            if (s.le(up[a], up[b])) {
              tp[a][b] = type_at(up[a], up[b], t, family[b]);
              if (!tp[a][b]) return true;
            }
        for (const auto& part : partitions) {
          std::vector<std::size_t> e(up.size());
          bool assumption = true;
          for (std::size_t a = 0; a < up.size() && assumption; ++a) {
            std::optional<std::size_t> cls;
            for (std::size_t b = 0; b < up.size() && assumption; ++b) {
              if (!tp[a][b]) continue;
              const auto c = class_of(part, *tp[a][b]);
              if (!c || (cls && *cls != *c)) assumption = false;
              cls = c;
            }
            if (assumption) e[a] = *cls;
          }
          if (!assumption) continue;
          if (++report.instances > budget) {
            report.verdict = ExVerdict::BudgetExhausted;
            return false;
          }
          // Conclusion: some s over I_vstar whose projected type is eventually
          // constant and inside e_u.
          std::optional<NodeId> best_from;
          std::vector<ElemId> best_s;
          for_each_tuple(top.size(), k2, [&](const std::vector<ElemId>& sv) {
            std::vector<ElemId> whole = t;
            whole.insert(whole.end(), sv.begin(), sv.end());
            for (std::size_t a = 0; a < up.size(); ++a) {
              bool holds = true;
              std::optional<QfType> constant;
              for (std::size_t b = 0; b < up.size() && holds; ++b) {
                if (!s.le(up[a], up[b])) continue;
                auto proj = project_tuple(s, up[b], vstar, whole);
                if (!proj) {
                  holds = false;
                  break;
                }
                const QfType p = qf_type(*proj, s.poset(up[b]));
                const auto c = class_of(part, p);
                holds = c && *c == e[b] && (!constant || *constant == p);
                constant = p;
              }
              if (holds && (!best_from || depth(s, up[a]) < depth(s, *best_from))) {
                best_from = up[a];
                best_s = sv;
              }
            }
            return true;
          });
          if (!best_from) {
            report.verdict = ExVerdict::CounterexampleCandidate;
            report.t = t;
            report.s.clear();
            report.from.reset();
            report.detail = "no s for t=" + join_names(top, t) + " from " + s.name(ustar);
            return false;
          }
          report.t = t;
          report.s = best_s;
          report.from = best_from;
        }
        return true;
      };
      return pick(0);
    });
    if (done) return report;
  }
  if (report.verdict == ExVerdict::Satisfied)
    report.detail = "t=" + join_names(top, report.t) + " s=" + join_names(top, report.s) +
                    (report.from ? " from " + s.name(*report.from) : "");
  return report;
}

FunctionFamily parse_funcs(std::string_view text) {
  const auto lines = detail::tokenize(text);
  if (lines.empty() || lines.front().tokens.empty() || lines.front().tokens[0] != "funcs")
    detail::parse_fail(lines.empty() ? 1 : lines.front().number, "expected header 'funcs'");
  FunctionFamily f;
  auto number_of = [](const std::string& s, int line) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
      detail::parse_fail(line, "expected a number, got '" + s + "'");
    return static_cast<std::size_t>(std::stoull(s));
  };
  for (std::size_t i = 1; i < lines.front().tokens.size(); ++i) {
    const std::string& tok = lines.front().tokens[i];
    const auto eq = tok.find('=');
    if (eq == std::string::npos) detail::parse_fail(lines.front().number, "expected key=value");
    const std::string key = tok.substr(0, eq);
    const std::size_t value = number_of(tok.substr(eq + 1), lines.front().number);
    if (key == "theta")
      f.theta = value;
    else if (key == "kappa")
      f.kappa = value;
    else
      detail::parse_fail(lines.front().number, "unknown key '" + key + "'");
  }
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [number, tok] = lines[i];
    if (tok[0] == "f" && tok.size() >= 2) {
      std::vector<std::size_t> values;
      for (std::size_t j = 2; j < tok.size(); ++j) values.push_back(number_of(tok[j], number));
      f.functions.push_back(std::move(values));
    } else if (tok[0] == "ideal" && tok.size() == 2) {
      std::set<std::size_t> member;
      if (tok[1] != "-")
        for (const std::string& x : detail::split(tok[1], ',')) member.insert(number_of(x, number));
      f.ideal.push_back(std::move(member));
    } else {
      detail::parse_fail(number, "unrecognized line '" + tok[0] + "'");
    }
  }
  return f;
}

BuiltSystem build_from_functions(const FunctionFamily& f, BuildOptions options) {
  if (f.theta < 2) throw Error(ErrorKind::InvalidArgument, "theta must be at least 2");
  if (f.kappa < 1) throw Error(ErrorKind::InvalidArgument, "kappa must be positive");
  if (f.functions.empty()) throw Error(ErrorKind::EmptyPoset, "empty function family");
  for (const auto& fn : f.functions) {
    if (fn.size() != f.theta) throw Error(ErrorKind::InvalidArgument, "function length differs from theta");
    for (std::size_t x : fn)
      if (x >= f.kappa) throw Error(ErrorKind::InvalidArgument, "value outside kappa");
  }

  const std::set<std::set<std::size_t>> ideal(f.ideal.begin(), f.ideal.end());
  std::set<std::size_t> whole;
  for (std::size_t i = 0; i < f.theta; ++i) whole.insert(i);
  if (!ideal.contains({})) throw Error(ErrorKind::NotAProperIdeal, "the ideal must contain the empty set");
  if (ideal.contains(whole)) throw Error(ErrorKind::NotAProperIdeal, "the ideal contains every index");
  for (const auto& a : ideal) {
    for (std::size_t x : a)
      if (x >= f.theta) throw Error(ErrorKind::NotAProperIdeal, "member outside theta");
    for (std::size_t x : a) {
      auto smaller = a;
      smaller.erase(x);
      if (!ideal.contains(smaller)) throw Error(ErrorKind::NotAProperIdeal, "not closed under subsets");
    }
    for (const auto& b : ideal) {
      auto both = a;
      both.insert(b.begin(), b.end());
      if (!ideal.contains(both)) throw Error(ErrorKind::NotAProperIdeal, "not closed under unions");
    }
  }

  std::set<std::vector<std::size_t>> family(f.functions.begin(), f.functions.end());
  if (options.pad) {
    for (const auto& fn : f.functions)
      if (*std::max_element(fn.begin(), fn.end()) + 1 >= f.kappa)
        throw Error(ErrorKind::PaddingOverflow, "kappa leaves no room for a successor");
    family.insert(std::vector<std::size_t>(f.theta, 0));
    std::vector<std::vector<std::size_t>> queue(family.begin(), family.end());
    while (!queue.empty()) {
      auto fn = queue.back();
      queue.pop_back();
      if (*std::max_element(fn.begin(), fn.end()) + 1 >= f.kappa) continue;
      for (auto& x : fn) ++x;
      if (family.insert(fn).second) queue.push_back(fn);
    }
  }

  auto show = [&](const std::vector<std::size_t>& fn, std::size_t len) {
    std::string out;
    for (std::size_t i = 0; i < len; ++i) {
      if (f.kappa > 10 && i) out += '.';
      out += std::to_string(fn[i]);
    }
    return out;
  };
  RawPowis raw;
  for (std::size_t a = 0; a < f.theta; ++a) raw.nodes.push_back("n" + std::to_string(a));
  raw.nodes.push_back("lim");
  for (std::size_t a = 0; a < f.theta; ++a) raw.order.emplace_back(raw.nodes[a], raw.nodes[a + 1]);
  raw.limit = "lim";
  raw.declared_nice = true;

  std::vector<std::vector<std::size_t>> members(family.begin(), family.end());
  for (std::size_t a = 0; a < f.theta; ++a) {
    // Node a sees restrictions to 0..a, ordered by the value at a.
    std::map<std::string, std::size_t> restricted;
    for (const auto& fn : members) restricted.emplace(show(fn, a + 1), fn[a]);
    RawPoset rp;
    for (const auto& [name, value] : restricted) rp.elements.push_back(name);
    for (const auto& [n1, v1] : restricted)
      for (const auto& [n2, v2] : restricted)
        if (v1 < v2) rp.lt.emplace_back(n1, n2);
    raw.posets.emplace_back(raw.nodes[a], std::move(rp));
  }
  RawPoset limit;
  for (const auto& fn : members) limit.elements.push_back(show(fn, f.theta));
  for (const auto& f1 : members)
    for (const auto& f2 : members) {
      std::set<std::size_t> bad;
      for (std::size_t i = 0; i < f.theta; ++i)
        if (!(f1[i] < f2[i])) bad.insert(i);
      if (ideal.contains(bad)) limit.lt.emplace_back(show(f1, f.theta), show(f2, f.theta));
    }
  raw.posets.emplace_back("lim", std::move(limit));

  for (std::size_t b = 1; b <= f.theta; ++b)
    for (std::size_t a = 0; a < b; ++a)
      for (const auto& fn : members)
        raw.maps.push_back({raw.nodes[a], raw.nodes[b], show(fn, std::min(b + 1, f.theta)), show(fn, a + 1)});
  std::sort(raw.maps.begin(), raw.maps.end(), [](const auto& x, const auto& y) {
    return std::tie(x.u, x.v, x.elem_v) < std::tie(y.u, y.v, y.elem_v);
  });
  raw.maps.erase(std::unique(raw.maps.begin(), raw.maps.end(),
                             [](const auto& x, const auto& y) {
                               return std::tie(x.u, x.v, x.elem_v, x.elem_u) == std::tie(y.u, y.v, y.elem_v, y.elem_u);
                             }),
                 raw.maps.end());

  BuiltSystem out{validate_powis(raw), 0, members};
  out.limit = *out.system.limit();
  return out;
}

}  // namespace nortower
