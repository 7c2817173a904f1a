#ifndef ENVLAB_FINSPACE_HPP
#define ENVLAB_FINSPACE_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "envlab/bitset.hpp"
#include "envlab/errors.hpp"

namespace envlab {

class FinSpace;
using SpacePtr = std::shared_ptr<const FinSpace>;

// A finite T0 space presented as a poset: the specialisation order determines
// the topology, opens are exactly the up-sets. Immutable after construction.
class FinSpace {
 public:
  // Builds the reflexive-transitive closure of `le_pairs` over `names`.
  // Throws CycleError if antisymmetry fails (the input is not T0) and
  // DuplicateNameError on repeated names.
  static SpacePtr from_order(std::vector<std::string> names,
                             const std::vector<std::pair<int, int>>& le_pairs) {
    if (names.empty()) throw Error("a space needs at least one element");
    {
      auto sorted = names;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw DuplicateNameError("element names must be pairwise distinct");
    }
    int n = static_cast<int>(names.size());
    std::vector<Bitset> up(n, Bitset(n));
    for (int i = 0; i < n; ++i) up[i].set(i);
    for (auto [a, b] : le_pairs) {
      if (a < 0 || a >= n || b < 0 || b >= n)
        throw Error("le pair references an element out of range");
      up[a].set(b);
    }
    // Warshall closure.
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        if (up[i].test(k)) up[i] |= up[k];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (up[i].test(j) && up[j].test(i))
          throw CycleError("antisymmetry violated between '" + names[i] +
                           "' and '" + names[j] + "'");
    return std::shared_ptr<const FinSpace>(
        new FinSpace(std::move(names), std::move(up)));
  }

  // Order already closed and verified by the caller.
  static SpacePtr from_closed_order(std::vector<std::string> names,
                                    std::vector<Bitset> up) {
    return std::shared_ptr<const FinSpace>(
        new FinSpace(std::move(names), std::move(up)));
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }

  bool le(int a, int b) const { return up_[a].test(b); }
  const Bitset& up_of(int i) const { return up_[i]; }
  const Bitset& down_of(int i) const { return down_[i]; }

  int index_of(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
      if (names_[i] == name) return i;
    throw Error("no element named '" + name + "'");
  }

  Bitset up_closure(const Bitset& a) const {
    Bitset r(size());
    a.for_each([&](int i) { r |= up_[i]; });
    return r;
  }
  Bitset down_closure(const Bitset& a) const {
    Bitset r(size());
    a.for_each([&](int i) { r |= down_[i]; });
    return r;
  }
  bool is_up_set(const Bitset& a) const {
    bool ok = true;
    a.for_each([&](int i) {
      if (!up_[i].subset_of(a)) ok = false;
    });
    return ok;
  }
  bool is_down_set(const Bitset& a) const {
    bool ok = true;
    a.for_each([&](int i) {
      if (!down_[i].subset_of(a)) ok = false;
    });
    return ok;
  }

  // Largest up-set contained in a: { x in a : up(x) subset of a }.
  Bitset interior(const Bitset& a) const {
    Bitset r(size());
    a.for_each([&](int i) {
      if (up_[i].subset_of(a)) r.set(i);
    });
    return r;
  }
  // Smallest down-set containing a, obtained as complement(interior(complement(a))).
  Bitset closure(const Bitset& a) const {
    return interior(a.complement()).complement();
  }

  bool is_discrete() const {
    for (int i = 0; i < size(); ++i)
      if (up_[i].count() != 1) return false;
    return true;
  }

  // Indices in some linear extension of the order (used for pruned search).
  std::vector<int> linear_extension() const {
    std::vector<int> order(size());
    std::vector<int> indeg(size(), 0);
    for (int i = 0; i < size(); ++i) indeg[i] = down_[i].count() - 1;
    std::vector<int> ready;
    for (int i = 0; i < size(); ++i)
      if (indeg[i] == 0) ready.push_back(i);
    int k = 0;
    while (!ready.empty()) {
      int v = ready.back();
      ready.pop_back();
      order[k++] = v;
      up_[v].for_each([&](int w) {
        if (w != v && --indeg[w] == 0) ready.push_back(w);
      });
    }
    return order;
  }

  bool same_structure(const FinSpace& o) const {
    return names_ == o.names_ && up_ == o.up_;
  }

  // Rendering key for the canonical ordering of subsets in reports:
  // cardinality first, then the lexicographic order of sorted member names.
  std::pair<int, std::vector<std::string>> subset_sort_key(const Bitset& a) const {
    std::vector<std::string> ns;
    a.for_each([&](int i) { ns.push_back(names_[i]); });
    std::sort(ns.begin(), ns.end());
    return {a.count(), std::move(ns)};
  }

  std::string render_subset(const Bitset& a) const {
    auto [c, ns] = subset_sort_key(a);
    (void)c;
    std::string s = "{";
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (i) s += ",";
      s += ns[i];
    }
    return s + "}";
  }

 private:
  FinSpace(std::vector<std::string> names, std::vector<Bitset> up)
      : names_(std::move(names)), up_(std::move(up)) {
    int n = size();
    down_.assign(n, Bitset(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (up_[j].test(i)) down_[i].set(j);
  }

  std::vector<std::string> names_;
  std::vector<Bitset> up_;
  std::vector<Bitset> down_;
};

inline bool same_space(const SpacePtr& a, const SpacePtr& b) {
  return a == b || a->same_structure(*b);
}

// An open (up-closed) subset of a space.
struct OpenSet {
  SpacePtr space;
  Bitset members;

  OpenSet() = default;
  OpenSet(SpacePtr s, Bitset m) : space(std::move(s)), members(std::move(m)) {
    if (!space->is_up_set(members))
      throw Error("OpenSet members not up-closed: " + space->render_subset(members));
  }

  bool contains(int i) const { return members.test(i); }
  friend bool operator==(const OpenSet& a, const OpenSet& b) {
    return same_space(a.space, b.space) && a.members == b.members;
  }
};

// A total, not necessarily continuous, function between spaces.
struct PointMap {
  SpacePtr domain;
  SpacePtr codomain;
  std::vector<int> assignment;

  PointMap() = default;
  PointMap(SpacePtr dom, SpacePtr cod, std::vector<int> a)
      : domain(std::move(dom)), codomain(std::move(cod)), assignment(std::move(a)) {
    if (static_cast<int>(assignment.size()) != domain->size())
      throw Error("PointMap assignment must be total");
    for (int v : assignment)
      if (v < 0 || v >= codomain->size())
        throw Error("PointMap value out of range");
  }

  int operator()(int i) const { return assignment[i]; }

  static PointMap identity(const SpacePtr& s) {
    std::vector<int> a(s->size());
    for (int i = 0; i < s->size(); ++i) a[i] = i;
    return PointMap(s, s, std::move(a));
  }
  static PointMap constant(const SpacePtr& dom, const SpacePtr& cod, int value) {
    return PointMap(dom, cod, std::vector<int>(dom->size(), value));
  }

  PointMap after(const PointMap& inner) const {
    if (!same_space(inner.codomain, domain))
      throw Error("composition domain mismatch");
    std::vector<int> a(inner.domain->size());
    for (int i = 0; i < inner.domain->size(); ++i) a[i] = assignment[inner(i)];
    return PointMap(inner.domain, codomain, std::move(a));
  }

  bool is_monotone() const {
    int n = domain->size();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (domain->le(i, j) && !codomain->le(assignment[i], assignment[j]))
          return false;
    return true;
  }

  Bitset preimage(const Bitset& sub) const {
    Bitset r(domain->size());
    for (int i = 0; i < domain->size(); ++i)
      if (sub.test(assignment[i])) r.set(i);
    return r;
  }
  Bitset image(const Bitset& sub) const {
    Bitset r(codomain->size());
    sub.for_each([&](int i) { r.set(assignment[i]); });
    return r;
  }

  friend bool operator==(const PointMap& a, const PointMap& b) {
    return same_space(a.domain, b.domain) && same_space(a.codomain, b.codomain) &&
           a.assignment == b.assignment;
  }
};

// An element of O^2(Y): an up-closed family of opens of Y, stored as its
// minimal antichain of generators. The canonical form (minimal generators in
// report order) is unique, so equality is structural. Only O(Y) is ever
// enumerated; families over big lattices stay antichain-represented.
class UpFamily {
 public:
  UpFamily() = default;
  UpFamily(SpacePtr space, std::vector<Bitset> generators)
      : space_(std::move(space)) {
    for (const auto& g : generators)
      if (!space_->is_up_set(g))
        throw Error("UpFamily generator is not open");
    antichain_ = minimize(*space_, std::move(generators));
  }

  static UpFamily empty(SpacePtr space) { return UpFamily(std::move(space), {}); }
  // The full family (every open, including the empty one): generated by {}.
  static UpFamily full(SpacePtr space) {
    Bitset empty_open(space->size());
    return UpFamily(std::move(space), {empty_open});
  }

  const SpacePtr& space() const { return space_; }
  const std::vector<Bitset>& antichain() const { return antichain_; }
  bool is_empty_family() const { return antichain_.empty(); }

  // Membership of an open in the denoted family.
  bool contains(const Bitset& open) const {
    for (const auto& g : antichain_)
      if (g.subset_of(open)) return true;
    return false;
  }

  // Family inclusion; this is the specialisation order of O^2(Y).
  bool subfamily_of(const UpFamily& o) const {
    for (const auto& g : antichain_)
      if (!o.contains(g)) return false;
    return true;
  }

  // Union of families (join in the inclusion order).
  UpFamily unite(const UpFamily& o) const {
    auto gens = antichain_;
    gens.insert(gens.end(), o.antichain_.begin(), o.antichain_.end());
    return UpFamily(space_, std::move(gens));
  }
  // Intersection of families (meet in the inclusion order): an open lies in
  // both families iff it contains a union of one generator from each side.
  UpFamily intersect(const UpFamily& o) const {
    std::vector<Bitset> gens;
    for (const auto& a : antichain_)
      for (const auto& b : o.antichain_) gens.push_back(a | b);
    return UpFamily(space_, std::move(gens));
  }

  friend bool operator==(const UpFamily& a, const UpFamily& b) {
    return same_space(a.space_, b.space_) && a.antichain_ == b.antichain_;
  }
  friend bool operator!=(const UpFamily& a, const UpFamily& b) { return !(a == b); }

 private:
  static std::vector<Bitset> minimize(const FinSpace& sp, std::vector<Bitset> gens) {
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    std::vector<Bitset> min;
    for (const auto& g : gens) {
      bool dominated = false;
      for (const auto& h : gens)
        if (!(h == g) && h.subset_of(g)) {
          dominated = true;
          break;
        }
      if (!dominated) min.push_back(g);
    }
    std::sort(min.begin(), min.end(), [&](const Bitset& a, const Bitset& b) {
      return sp.subset_sort_key(a) < sp.subset_sort_key(b);
    });
    return min;
  }

  SpacePtr space_;
  std::vector<Bitset> antichain_;
};

// All opens of a space, in canonical report order, with index lookup.
class OpensLattice {
 public:
  OpensLattice() = default;

  const SpacePtr& space() const { return space_; }
  int count() const { return static_cast<int>(opens_.size()); }
  const Bitset& open_at(int i) const { return opens_[i]; }
  const std::vector<Bitset>& all() const { return opens_; }

  int index_of(const Bitset& open) const {
    auto it = index_.find(open);
    if (it == index_.end()) throw Error("not an open of this space");
    return it->second;
  }
  bool is_open(const Bitset& a) const { return index_.count(a) > 0; }

  int empty_index() const { return index_of(Bitset(space_->size())); }
  int full_index() const { return index_of(Bitset::full(space_->size())); }

  // The lattice of opens presented as a finite space (inclusion order).
  // Recomputed per call; callers hold on to the result.
  SpacePtr as_space() const {
    int m = count();
    std::vector<std::string> names(m);
    std::vector<Bitset> up(m, Bitset(m));
    for (int i = 0; i < m; ++i) names[i] = space_->render_subset(opens_[i]);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (opens_[i].subset_of(opens_[j])) up[i].set(j);
    return FinSpace::from_closed_order(std::move(names), std::move(up));
  }

  friend OpensLattice opens(const SpacePtr&, const Config&);

 private:
  SpacePtr space_;
  std::vector<Bitset> opens_;
  std::unordered_map<Bitset, int, BitsetHash> index_;
};

// Enumerates all up-sets of X. Exponential in |X|, hence the cap.
inline OpensLattice opens(const SpacePtr& X, const Config& cfg = {}) {
  int n = X->size();
  if (n > cfg.cap_opens)
    throw CapExceeded("opens", cfg.cap_opens, n);
  OpensLattice out;
  out.space_ = X;
  // Subset filter over 2^n candidates; n is capped so this stays desk-scale.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset b(n);
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) b.set(i);
    if (X->is_up_set(b)) out.opens_.push_back(std::move(b));
  }
  std::sort(out.opens_.begin(), out.opens_.end(),
            [&](const Bitset& a, const Bitset& b) {
              return X->subset_sort_key(a) < X->subset_sort_key(b);
            });
  for (int i = 0; i < out.count(); ++i) out.index_[out.opens_[i]] = i;
  return out;
}

struct MapClassification {
  bool continuous = false;
  bool open_map = false;
};

// Continuity on finite Alexandroff spaces is monotonicity; openness reduces
// to openness of the images of principal up-sets because every open is a
// union of those and images commute with unions. Both identifications are
// property-tested against the enumeration definitions.
inline MapClassification classify_map(const PointMap& f) {
  MapClassification out;
  out.continuous = f.is_monotone();
  out.open_map = true;
  for (int i = 0; i < f.domain->size(); ++i) {
    if (!f.codomain->is_up_set(f.image(f.domain->up_of(i)))) {
      out.open_map = false;
      break;
    }
  }
  return out;
}

// The neighbourhood filter of a point, i.e. the unit of the double
// powerspace monad: { U open : x in U }, generated by the principal up-set.
inline UpFamily neighbourhood_filter(const SpacePtr& X, int x) {
  return UpFamily(X, {X->up_of(x)});
}

// interior(f^{-1}(V)); equals f^{-1}(V) exactly when f is continuous.
inline OpenSet interior_preimage(const PointMap& f, const OpenSet& V) {
  if (!same_space(V.space, f.codomain))
    throw Error("interior_preimage: open set lives in the wrong space");
  return OpenSet(f.domain, f.domain->interior(f.preimage(V.members)));
}

// Image of an open under an open map.
inline OpenSet pushforward(const PointMap& f, const OpenSet& U) {
  if (!classify_map(f).open_map)
    throw NotOpenMap("pushforward requires an open map");
  return OpenSet(f.codomain, f.image(U.members));
}

// Functorial action of O^2 on a continuous map phi : Y -> M applied to a
// family over Y: { W open in M : phi^{-1}(W) in fam }. On antichains this is
// generated by the up-closures of generator images; the enumeration
// definition is kept as a test oracle.
inline UpFamily pushforward_family(const PointMap& phi, const UpFamily& fam) {
  if (!phi.is_monotone())
    throw NotContinuous("pushforward_family needs a continuous map");
  if (!same_space(fam.space(), phi.domain))
    throw Error("pushforward_family: family over the wrong space");
  std::vector<Bitset> gens;
  gens.reserve(fam.antichain().size());
  for (const auto& g : fam.antichain())
    gens.push_back(phi.codomain->up_closure(phi.image(g)));
  return UpFamily(phi.codomain, std::move(gens));
}

// Materialised O^2(Y): the opens-of-opens lattice with provenance, used
// where elements of O^2(Y) must be treated as points of a space.
struct DoubleOpens {
  SpacePtr base;          // Y
  OpensLattice opens_y;   // O(Y)
  SpacePtr oy_space;      // O(Y) as a space
  OpensLattice opens_oy;  // up-sets of O(Y), i.e. elements of O^2(Y)
  SpacePtr space;         // O^2(Y) as a space

  // Encode a family as an element index of the materialised space.
  int index_of(const UpFamily& fam) const {
    Bitset b(opens_y.count());
    for (int v = 0; v < opens_y.count(); ++v)
      if (fam.contains(opens_y.open_at(v))) b.set(v);
    return opens_oy.index_of(b);
  }
  // Decode an element back into antichain form.
  UpFamily family_at(int idx) const {
    std::vector<Bitset> gens;
    opens_oy.open_at(idx).for_each(
        [&](int v) { gens.push_back(opens_y.open_at(v)); });
    return UpFamily(base, std::move(gens));
  }
};

inline DoubleOpens double_opens(const SpacePtr& Y, const Config& cfg = {}) {
  DoubleOpens d;
  d.base = Y;
  d.opens_y = opens(Y, cfg);
  d.oy_space = d.opens_y.as_space();
  d.opens_oy = opens(d.oy_space, cfg);
  d.space = d.opens_oy.as_space();
  return d;
}

// Monad multiplication O^4(Y) -> O^2(Y). The argument is a family over the
// materialised O^2(Y) space; the result is
//   { V in O(Y) : { U in O^2(Y) : V in U } in quad }.
inline UpFamily flatten(const DoubleOpens& d, const UpFamily& quad,
                        const Config& cfg = {}) {
  if (d.base->size() > cfg.cap_mu)
    throw CapExceeded("mu", cfg.cap_mu, d.base->size());
  if (!same_space(quad.space(), d.space))
    throw Error("flatten: family must live over the materialised O^2 space");
  std::vector<Bitset> vs;
  for (int v = 0; v < d.opens_y.count(); ++v) {
    // nu_{O(Y)}(V) as an up-set of the O^2(Y) space.
    Bitset nv(d.opens_oy.count());
    for (int u = 0; u < d.opens_oy.count(); ++u)
      if (d.opens_oy.open_at(u).test(v)) nv.set(u);
    if (quad.contains(nv)) vs.push_back(d.opens_y.open_at(v));
  }
  return UpFamily(d.base, std::move(vs));
}

// The space of continuous maps Z -> Y under the pointwise order. For finite
// spaces the Alexandroff topology of this order realises the exponential.
struct ExponentialSpace {
  SpacePtr dom;  // Z
  SpacePtr cod;  // Y
  std::vector<std::vector<int>> maps;
  SpacePtr space;

  PointMap map_at(int i) const { return PointMap(dom, cod, maps[i]); }
  int index_of(const PointMap& f) const {
    for (int i = 0; i < static_cast<int>(maps.size()); ++i)
      if (maps[i] == f.assignment) return i;
    throw Error("map is not continuous or not in this exponential");
  }
};

inline ExponentialSpace exponential(const SpacePtr& Z, const SpacePtr& Y,
                                    const Config& cfg = {}) {
  ExponentialSpace e;
  e.dom = Z;
  e.cod = Y;
  std::vector<int> order = Z->linear_extension();
  std::vector<int> a(Z->size(), -1);
  // DFS over assignments in a linear extension, pruning on monotonicity.
  std::vector<int> stack_pos;
  std::function<void(int)> rec = [&](int k) {
    if (k == Z->size()) {
      e.maps.push_back(a);
      if (static_cast<int>(e.maps.size()) > cfg.cap_exponential)
        throw CapExceeded("exponential", cfg.cap_exponential,
                          static_cast<long long>(e.maps.size()));
      return;
    }
    int z = order[k];
    for (int y = 0; y < Y->size(); ++y) {
      bool ok = true;
      for (int k2 = 0; k2 < k && ok; ++k2) {
        int z2 = order[k2];
        if (Z->le(z2, z) && !Y->le(a[z2], y)) ok = false;
        if (Z->le(z, z2) && !Y->le(y, a[z2])) ok = false;
      }
      if (!ok) continue;
      a[z] = y;
      rec(k + 1);
      a[z] = -1;
    }
  };
  rec(0);
  std::sort(e.maps.begin(), e.maps.end());
  int m = static_cast<int>(e.maps.size());
  std::vector<std::string> names(m);
  std::vector<Bitset> up(m, Bitset(m));
  for (int i = 0; i < m; ++i) {
    std::string s = "[";
    for (int z = 0; z < Z->size(); ++z) {
      if (z) s += ",";
      s += Z->name(z) + ":" + Y->name(e.maps[i][z]);
    }
    names[i] = s + "]";
  }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      bool le = true;
      for (int z = 0; z < Z->size() && le; ++z)
        if (!Y->le(e.maps[i][z], e.maps[j][z])) le = false;
      if (le) up[i].set(j);
    }
  e.space = FinSpace::from_closed_order(std::move(names), std::move(up));
  return e;
}

// Binary product with the componentwise order.
struct ProductSpace {
  SpacePtr left, right;
  SpacePtr space;
  int index_of(int a, int b) const { return a * right->size() + b; }
  std::pair<int, int> parts(int i) const {
    return {i / right->size(), i % right->size()};
  }
};

inline ProductSpace product(const SpacePtr& A, const SpacePtr& B) {
  ProductSpace p;
  p.left = A;
  p.right = B;
  int n = A->size() * B->size();
  std::vector<std::string> names(n);
  std::vector<Bitset> up(n, Bitset(n));
  for (int a = 0; a < A->size(); ++a)
    for (int b = 0; b < B->size(); ++b)
      names[a * B->size() + b] = "(" + A->name(a) + "," + B->name(b) + ")";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (A->le(i / B->size(), j / B->size()) &&
          B->le(i % B->size(), j % B->size()))
        up[i].set(j);
  p.space = FinSpace::from_closed_order(std::move(names), std::move(up));
  return p;
}

// Stock spaces.
inline SpacePtr sierpinski() {
  return FinSpace::from_order({"bot", "top"}, {{0, 1}});
}
inline SpacePtr discrete_space(const std::vector<std::string>& names) {
  return FinSpace::from_order(names, {});
}
inline SpacePtr chain_space(const std::vector<std::string>& names) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < static_cast<int>(names.size()); ++i)
    pairs.push_back({i, i + 1});
  return FinSpace::from_order(names, pairs);
}
inline SpacePtr point_space() { return FinSpace::from_order({"pt"}, {}); }

}  // namespace envlab

#endif  // ENVLAB_FINSPACE_HPP
