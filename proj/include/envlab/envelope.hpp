#ifndef ENVLAB_ENVELOPE_HPP
#define ENVLAB_ENVELOPE_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envlab/finspace.hpp"
#include "envlab/lattice.hpp"

namespace envlab {

// An injective space in the finite model is a complete lattice L together
// with a continuous inclusion xi : Y -> L.
struct ApproxSpace {
  LatticePtr L;
  PointMap xi;

  ApproxSpace() = default;
  ApproxSpace(LatticePtr lat, PointMap inclusion)
      : L(std::move(lat)), xi(std::move(inclusion)) {
    if (!same_space(xi.codomain, L->space()))
      throw Error("ApproxSpace: xi must land in L");
    if (!xi.is_monotone()) throw NotContinuous("ApproxSpace: xi not continuous");
  }

  const SpacePtr& Y() const { return xi.domain; }
};

// A lattice-valued envelope of f: continuous F : X -> L with F <= xi o f.
struct Envelope {
  ApproxSpace approx;
  PointMap F;
  PointMap f;

  Envelope() = default;
  Envelope(ApproxSpace a, PointMap big_f, PointMap small_f)
      : approx(std::move(a)), F(std::move(big_f)), f(std::move(small_f)) {
    if (!same_space(F.codomain, approx.L->space()))
      throw Error("Envelope: F must land in L");
    if (!same_space(f.codomain, approx.Y()))
      throw Error("Envelope: f must land in Y");
    if (!same_space(F.domain, f.domain)) throw Error("Envelope: domain mismatch");
    if (!F.is_monotone()) throw NotContinuous("Envelope: F not continuous");
    for (int x = 0; x < F.domain->size(); ++x)
      if (!approx.L->leq(F(x), approx.xi(f(x))))
        throw NotAnEnvelope("F(x) above xi(f(x)) at '" + F.domain->name(x) + "'");
  }
};

// An O^2(Y)-valued map X -> O^2(Y) in antichain representation. When `f` is
// present the defining inequality F <= nu o f is enforced; without it the
// type holds an arbitrary continuous O^2-valued map (star calculus applies
// to those too).
struct FamilyEnvelope {
  SpacePtr X;
  SpacePtr Y;
  std::vector<UpFamily> values;
  std::optional<PointMap> f;

  FamilyEnvelope() = default;
  FamilyEnvelope(SpacePtr x, SpacePtr y, std::vector<UpFamily> vals,
                 std::optional<PointMap> fn = std::nullopt)
      : X(std::move(x)), Y(std::move(y)), values(std::move(vals)), f(std::move(fn)) {
    if (static_cast<int>(values.size()) != X->size())
      throw Error("FamilyEnvelope: one value per element");
    for (const auto& v : values)
      if (!same_space(v.space(), Y)) throw Error("FamilyEnvelope: value space mismatch");
    for (int a = 0; a < X->size(); ++a)
      for (int b = 0; b < X->size(); ++b)
        if (X->le(a, b) && !values[a].subfamily_of(values[b]))
          throw NotContinuous("FamilyEnvelope: values not monotone");
    if (f) {
      for (int a = 0; a < X->size(); ++a)
        for (const auto& g : values[a].antichain())
          if (!g.test((*f)(a)))
            throw NotAnEnvelope("family at '" + X->name(a) +
                                "' not below the neighbourhood filter of f");
    }
  }

  const UpFamily& at(int x) const { return values[x]; }
};

// The principal L-envelope of an arbitrary f : X -> Y:
//   F(x) = meet over x' >= x of xi(f(x')).
// It is continuous, below xi o f, and pointwise greatest among such maps.
inline Envelope principal_envelope(const PointMap& f, const ApproxSpace& approx) {
  if (!same_space(f.codomain, approx.Y()))
    throw Error("principal_envelope: f must land in the approximated space");
  const auto& X = f.domain;
  std::vector<int> vals(X->size());
  for (int x = 0; x < X->size(); ++x) {
    int acc = approx.L->top();
    X->up_of(x).for_each(
        [&](int xp) { acc = approx.L->meet(acc, approx.xi(f(xp))); });
    vals[x] = acc;
  }
  return Envelope(approx, PointMap(X, approx.L->space(), std::move(vals)), f);
}

// The principal O^2(Y)-envelope: F(x) = { V open : V contains f(up(x)) },
// generated by the up-closure of the image of the principal up-set.
inline FamilyEnvelope principal_family_envelope(const PointMap& f) {
  const auto& X = f.domain;
  const auto& Y = f.codomain;
  std::vector<UpFamily> vals;
  vals.reserve(X->size());
  for (int x = 0; x < X->size(); ++x)
    vals.emplace_back(Y, std::vector<Bitset>{Y->up_closure(f.image(X->up_of(x)))});
  return FamilyEnvelope(X, Y, std::move(vals), f);
}

// Transport table of an O^2-valued map: row(V) = { x : V in F(x) }.
struct StarTable {
  SpacePtr X;
  OpensLattice opens_y;
  std::vector<Bitset> rows;  // indexed like opens_y, each an open of X

  const Bitset& row(int open_index) const { return rows[open_index]; }
};

inline StarTable star_table(const FamilyEnvelope& env, const Config& cfg = {}) {
  StarTable t;
  t.X = env.X;
  t.opens_y = opens(env.Y, cfg);
  t.rows.reserve(t.opens_y.count());
  for (int v = 0; v < t.opens_y.count(); ++v) {
    Bitset row(env.X->size());
    for (int x = 0; x < env.X->size(); ++x)
      if (env.at(x).contains(t.opens_y.open_at(v))) row.set(x);
    if (!env.X->is_up_set(row))
      throw Error("star row not open; input map was not continuous");
    t.rows.push_back(std::move(row));
  }
  return t;
}

// The robust properties of f at x: opens V whose preimage is a neighbourhood
// of x. On finite spaces this is always a filter base.
inline std::vector<Bitset> robust_filter(const PointMap& f, int x,
                                         const Config& cfg = {}) {
  auto ol = opens(f.codomain, cfg);
  std::vector<Bitset> out;
  for (int v = 0; v < ol.count(); ++v)
    if (f.domain->interior(f.preimage(ol.open_at(v))).test(x))
      out.push_back(ol.open_at(v));
  return out;
}

struct UniversalityReport {
  bool verdict = false;
  // First failing pair in canonical order: (point, open of Y).
  std::optional<std::pair<int, Bitset>> counterexample;
};

// Uniform universality of an O^2(Y)-envelope: the star table must equal the
// interior-preimage table of f.
inline UniversalityReport is_uniformly_universal(const PointMap& f,
                                                 const FamilyEnvelope& env,
                                                 const Config& cfg = {}) {
  if (!same_space(f.domain, env.X) || !same_space(f.codomain, env.Y))
    throw Error("is_uniformly_universal: envelope/function mismatch");
  for (int x = 0; x < env.X->size(); ++x)
    for (const auto& g : env.at(x).antichain())
      if (!g.test(f(x)))
        throw NotAnEnvelope("not an envelope of f at '" + env.X->name(x) + "'");
  auto st = star_table(env, cfg);
  UniversalityReport rep;
  rep.verdict = true;
  for (int v = 0; v < st.opens_y.count(); ++v) {
    Bitset want = f.domain->interior(f.preimage(st.opens_y.open_at(v)));
    if (!(st.rows[v] == want)) {
      rep.verdict = false;
      Bitset missing = want.minus(st.rows[v]);
      int x = missing.members().front();
      rep.counterexample = {x, st.opens_y.open_at(v)};
      return rep;
    }
  }
  return rep;
}

// Kleisli composition of O^2-valued maps through the star identity:
//   (G after F)(x) = { W in O(Z) : star(G)(W) in F(x) }.
// The monadic route (flatten of the pushforward) is kept alongside as the
// small-space oracle. The star table of G can be supplied when composing
// one G against many F.
inline FamilyEnvelope compose_families_with(const StarTable& stG,
                                            const FamilyEnvelope& G,
                                            const FamilyEnvelope& F) {
  if (!same_space(F.Y, G.X)) throw Error("compose_families: spaces do not chain");
  std::vector<UpFamily> vals;
  vals.reserve(F.X->size());
  for (int x = 0; x < F.X->size(); ++x) {
    std::vector<Bitset> ws;
    for (int w = 0; w < stG.opens_y.count(); ++w)
      if (F.at(x).contains(stG.rows[w])) ws.push_back(stG.opens_y.open_at(w));
    vals.emplace_back(G.Y, std::move(ws));
  }
  std::optional<PointMap> gf;
  if (F.f && G.f) gf = G.f->after(*F.f);
  return FamilyEnvelope(F.X, G.Y, std::move(vals), std::move(gf));
}

inline FamilyEnvelope compose_families(const FamilyEnvelope& G,
                                       const FamilyEnvelope& F,
                                       const Config& cfg = {}) {
  return compose_families_with(star_table(G, cfg), G, F);
}

inline FamilyEnvelope compose_families_monadic(const FamilyEnvelope& G,
                                               const FamilyEnvelope& F,
                                               const Config& cfg = {}) {
  if (!same_space(F.Y, G.X)) throw Error("compose_families: spaces do not chain");
  auto D = double_opens(G.Y, cfg);
  if (G.Y->size() > cfg.cap_mu)
    throw CapExceeded("mu", cfg.cap_mu, G.Y->size());
  std::vector<int> idx(G.X->size());
  for (int y = 0; y < G.X->size(); ++y) idx[y] = D.index_of(G.at(y));
  PointMap g_pts(G.X, D.space, std::move(idx));
  std::vector<UpFamily> vals;
  vals.reserve(F.X->size());
  for (int x = 0; x < F.X->size(); ++x)
    vals.push_back(flatten(D, pushforward_family(g_pts, F.at(x)), cfg));
  std::optional<PointMap> gf;
  if (F.f && G.f) gf = G.f->after(*F.f);
  return FamilyEnvelope(F.X, G.Y, std::move(vals), std::move(gf));
}

// Greatest continuous right extension (xi_M / xi_L) : L -> M:
//   Phi(l) = meet { xi_M(y) : xi_L(y) >= l },  empty meet = top of M.
inline PointMap greatest_right_extension(const ApproxSpace& L,
                                         const ApproxSpace& M) {
  if (!same_space(L.Y(), M.Y()))
    throw Error("right extension needs approximation spaces over the same Y");
  std::vector<int> vals(L.L->size());
  for (int l = 0; l < L.L->size(); ++l) {
    int acc = M.L->top();
    for (int y = 0; y < L.Y()->size(); ++y)
      if (L.L->leq(l, L.xi(y))) acc = M.L->meet(acc, M.xi(y));
    vals[l] = acc;
  }
  return PointMap(L.L->space(), M.L->space(), std::move(vals));
}

struct TighteningReport {
  bool verdict = false;
  std::optional<PointMap> witness;
};

// F tightens G iff the greatest right extension witnesses it; if any map
// does, that one does.
inline TighteningReport tightens(const Envelope& F, const Envelope& G) {
  if (!(F.f == G.f)) throw Error("tightens: envelopes of different functions");
  PointMap phi = greatest_right_extension(F.approx, G.approx);
  TighteningReport rep;
  rep.verdict = true;
  for (int x = 0; x < F.F.domain->size(); ++x)
    if (!G.approx.L->leq(G.F(x), phi(F.F(x)))) {
      rep.verdict = false;
      return rep;
    }
  rep.witness = std::move(phi);
  return rep;
}

// The algebra map rho_L : O^2(L) -> L, order-theoretically: the join of the
// meets of the generators. Left inverse of the neighbourhood-filter map.
inline int collapse(const Lattice& L, const UpFamily& fam) {
  if (!same_space(fam.space(), L.space()))
    throw Error("collapse: family over the wrong lattice");
  int acc = L.bottom();
  for (const auto& g : fam.antichain()) acc = L.join(acc, L.meet_of(g));
  return acc;
}

// A uniform approximation space: (L, xi) plus a continuous u : L -> O^2(Y)
// tied to the monad structure by three axioms (checked, not assumed).
struct UniformApproxSpace {
  ApproxSpace base;
  std::vector<UpFamily> u;  // indexed by elements of L, families over Y

  UniformApproxSpace() = default;
  UniformApproxSpace(ApproxSpace b, std::vector<UpFamily> uu)
      : base(std::move(b)), u(std::move(uu)) {
    if (static_cast<int>(u.size()) != base.L->size())
      throw Error("UniformApproxSpace: u must be total on L");
    for (const auto& fam : u)
      if (!same_space(fam.space(), base.Y()))
        throw Error("UniformApproxSpace: u value over the wrong space");
    for (int a = 0; a < base.L->size(); ++a)
      for (int b = 0; b < base.L->size(); ++b)
        if (base.L->leq(a, b) && !u[a].subfamily_of(u[b]))
          throw NotContinuous("UniformApproxSpace: u not continuous");
  }
};

// The extension operator E_{L,M}(phi) = rho_M o phi** o u_L, evaluated on
// antichains: l maps to the join over generators A of u_L(l) of the meet of
// phi(A). No opens enumeration of M is needed; the enumerated composite is
// kept as an oracle below.
inline PointMap extension_map(const UniformApproxSpace& us, const LatticePtr& M,
                              const PointMap& phi) {
  if (!same_space(phi.domain, us.base.Y()) || !same_space(phi.codomain, M->space()))
    throw Error("extension_map: phi must map Y into M");
  if (!phi.is_monotone()) throw NotContinuous("extension_map: phi not continuous");
  std::vector<int> vals(us.base.L->size());
  for (int l = 0; l < us.base.L->size(); ++l) {
    int acc = M->bottom();
    for (const auto& g : us.u[l].antichain()) {
      int m = M->top();
      g.for_each([&](int y) { m = M->meet(m, phi(y)); });
      acc = M->join(acc, m);
    }
    vals[l] = acc;
  }
  return PointMap(us.base.L->space(), M->space(), std::move(vals));
}

// Literal composite rho_M o phi** o u_L with phi** computed by enumerating
// the opens of M. Exponential in |M|; used to cross-check extension_map.
inline PointMap extension_map_enumerated(const UniformApproxSpace& us,
                                         const LatticePtr& M,
                                         const PointMap& phi,
                                         const Config& cfg = {}) {
  auto ol = opens(M->space(), cfg);
  std::vector<int> vals(us.base.L->size());
  for (int l = 0; l < us.base.L->size(); ++l) {
    int acc = M->bottom();
    for (int w = 0; w < ol.count(); ++w)
      if (us.u[l].contains(phi.preimage(ol.open_at(w))))
        acc = M->join(acc, M->meet_of(ol.open_at(w)));
    vals[l] = acc;
  }
  return PointMap(us.base.L->space(), M->space(), std::move(vals));
}

// F (uniform, over us) uniformly tightens G iff E_{L,M}(xi_M) o F >= G.
inline bool uniformly_tightens(const UniformApproxSpace& us, const Envelope& F,
                               const Envelope& G) {
  if (!(F.f == G.f)) throw Error("uniformly_tightens: different functions");
  PointMap e = extension_map(us, G.approx.L, G.approx.xi);
  for (int x = 0; x < F.F.domain->size(); ++x)
    if (!G.approx.L->leq(G.F(x), e(F.F(x)))) return false;
  return true;
}

struct UniformAxiomReport {
  bool ax1 = false, ax2 = false, ax3 = false;
  std::optional<int> ax1_counterexample;  // a point of Y
  std::optional<int> ax2_counterexample;  // an element of L
  std::optional<std::string> ax3_counterexample;
  int ax3_tested = 0;

  bool all() const { return ax1 && ax2 && ax3; }
};

// Verifies the three axioms of a uniform approximation space. Axiom 3 is
// checked on the join-closure of the neighbourhood-filter images (plus the
// empty and full families) rather than all of O^2(L), which is never
// enumerated; the report carries the number of elements tested.
inline UniformAxiomReport check_uniform_axioms(const UniformApproxSpace& us,
                                               const Config& cfg = {}) {
  UniformAxiomReport rep;
  const auto& Y = us.base.Y();
  const auto& L = us.base.L;

  rep.ax1 = true;
  for (int y = 0; y < Y->size() && rep.ax1; ++y) {
    const UpFamily& fam = us.u[us.base.xi(y)];
    for (const auto& g : fam.antichain())
      if (!g.test(y)) {
        rep.ax1 = false;
        rep.ax1_counterexample = y;
        break;
      }
  }

  rep.ax2 = true;
  PointMap e = extension_map(us, L, us.base.xi);
  for (int l = 0; l < L->size(); ++l)
    if (!L->leq(l, e(l))) {
      rep.ax2 = false;
      rep.ax2_counterexample = l;
      break;
    }

  if (Y->size() > cfg.cap_mu)
    throw CapExceeded("mu", cfg.cap_mu, Y->size());
  auto D = double_opens(Y, cfg);
  std::vector<int> uid(L->size());
  for (int l = 0; l < L->size(); ++l) uid[l] = D.index_of(us.u[l]);
  PointMap u_pts(L->space(), D.space, std::move(uid));

  auto test_one = [&](const UpFamily& w) -> bool {
    UpFamily lhs = us.u[collapse(*L, w)];
    UpFamily rhs = flatten(D, pushforward_family(u_pts, w), cfg);
    return lhs == rhs;
  };
  // The tested subfamily of O^2(L): the filter images of the points of L
  // and the joins of those. O^2(L) itself is never enumerated.
  std::vector<UpFamily> tests;
  for (int l = 0; l < L->size(); ++l)
    tests.push_back(neighbourhood_filter(L->space(), l));
  int singles = static_cast<int>(tests.size());
  UpFamily all = tests.empty() ? UpFamily::empty(L->space()) : tests[0];
  for (int i = 0; i < singles; ++i)
    for (int j = i + 1; j < singles; ++j)
      tests.push_back(tests[i].unite(tests[j]));
  for (int i = 1; i < singles; ++i) all = all.unite(tests[i]);
  tests.push_back(all);
  rep.ax3 = true;
  rep.ax3_tested = static_cast<int>(tests.size());
  for (const auto& w : tests)
    if (!test_one(w)) {
      rep.ax3 = false;
      rep.ax3_counterexample = "axiom 3 fails on a tested element of O^2(L)";
      break;
    }
  return rep;
}

// The double powerspace as a uniform approximation space for Y itself:
// L = O^2(Y), xi = the neighbourhood-filter map, u = identity.
struct CanonicalUniformSpace {
  DoubleOpens D;
  UniformApproxSpace us;
};

inline CanonicalUniformSpace canonical_uniform_space(const SpacePtr& Y,
                                                     const Config& cfg = {}) {
  CanonicalUniformSpace c;
  c.D = double_opens(Y, cfg);
  auto L = Lattice::from_space(c.D.space, cfg);
  std::vector<int> nu_idx(Y->size());
  for (int y = 0; y < Y->size(); ++y)
    nu_idx[y] = c.D.index_of(neighbourhood_filter(Y, y));
  ApproxSpace base(L, PointMap(Y, c.D.space, std::move(nu_idx)));
  std::vector<UpFamily> u;
  u.reserve(L->size());
  for (int l = 0; l < L->size(); ++l) u.push_back(c.D.family_at(l));
  c.us = UniformApproxSpace(std::move(base), std::move(u));
  return c;
}

// Lifts an O^2-valued envelope to a lattice-valued one over the materialised
// double powerspace. Only sensible for small Y.
inline Envelope to_lattice_envelope(const FamilyEnvelope& env,
                                    const CanonicalUniformSpace& c) {
  if (!env.f) throw Error("to_lattice_envelope: envelope must carry f");
  std::vector<int> vals(env.X->size());
  for (int x = 0; x < env.X->size(); ++x) vals[x] = c.D.index_of(env.at(x));
  return Envelope(c.us.base, PointMap(env.X, c.D.space, std::move(vals)), *env.f);
}

// The overt-subsets space of Y in the finite model: nonempty down-sets under
// inclusion, together with the inclusion i into O^2(Y) and the uniformity j.
struct OvertSpace {
  SpacePtr base;               // Y
  SpacePtr space;              // V(Y)
  std::vector<Bitset> downs;   // element payloads: nonempty down-sets of Y
  DoubleOpens D;               // materialised O^2(Y)
  UniformApproxSpace us;       // (O^2(Y), i, j) as a uniform space for V(Y)

  int index_of(const Bitset& down) const {
    for (int i = 0; i < static_cast<int>(downs.size()); ++i)
      if (downs[i] == down) return i;
    throw Error("not a nonempty down-set of the base space");
  }
  // i(A) = { U open : U meets A }.
  UpFamily inclusion_family(int v) const { return D.family_at(us.base.xi(v)); }
};

inline OvertSpace overt_space(const SpacePtr& Y, const Config& cfg = {}) {
  if (Y->size() > cfg.cap_mu)
    throw CapExceeded("mu", cfg.cap_mu, Y->size());
  OvertSpace o;
  o.base = Y;
  int n = Y->size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset b(n);
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) b.set(i);
    if (Y->is_down_set(b)) o.downs.push_back(std::move(b));
  }
  std::sort(o.downs.begin(), o.downs.end(), [&](const Bitset& a, const Bitset& b) {
    return Y->subset_sort_key(a) < Y->subset_sort_key(b);
  });
  int m = static_cast<int>(o.downs.size());
  std::vector<std::string> names(m);
  std::vector<Bitset> up(m, Bitset(m));
  for (int i = 0; i < m; ++i) names[i] = Y->render_subset(o.downs[i]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (o.downs[i].subset_of(o.downs[j])) up[i].set(j);
  o.space = FinSpace::from_closed_order(std::move(names), std::move(up));

  o.D = double_opens(Y, cfg);
  auto L = Lattice::from_space(o.D.space, cfg);
  // i(A) = { U : U meets A }
  std::vector<int> xi(m);
  for (int v = 0; v < m; ++v) {
    std::vector<Bitset> gens;
    for (int u = 0; u < o.D.opens_y.count(); ++u)
      if (o.D.opens_y.open_at(u).intersects(o.downs[v]))
        gens.push_back(o.D.opens_y.open_at(u));
    xi[v] = o.D.index_of(UpFamily(Y, std::move(gens)));
  }
  ApproxSpace base(L, PointMap(o.space, o.D.space, std::move(xi)));
  // j(U-family) is generated by { A in V(Y) : A meets every member },
  // which reduces to meeting every generator.
  std::vector<UpFamily> u;
  u.reserve(L->size());
  for (int l = 0; l < L->size(); ++l) {
    UpFamily fam = o.D.family_at(l);
    Bitset k(m);
    for (int v = 0; v < m; ++v) {
      bool meets_all = true;
      for (const auto& g : fam.antichain())
        if (!g.intersects(o.downs[v])) {
          meets_all = false;
          break;
        }
      if (meets_all) k.set(v);
    }
    u.emplace_back(o.space, std::vector<Bitset>{k});
  }
  o.us = UniformApproxSpace(std::move(base), std::move(u));
  return o;
}

struct SeparationReport {
  bool separated = false;
  std::optional<int> separated_counterexample;  // element of L
  std::optional<bool> regular;
  std::optional<std::pair<int, Bitset>> regular_counterexample;  // (x, V)
};

// Separated: every fibre xi^{-1}(up(l)) is closed (a down-set of Y); this is
// the finite-model reading of continuity of the fibre map into A(Y), whose
// order is reverse inclusion. Regular adds the closure-interpolation
// property, which needs the opens of L and is skipped when with_regular is
// false (callers probing large double powerspaces only need separatedness).
inline SeparationReport separated_regular_check(const ApproxSpace& approx,
                                                const Config& cfg = {},
                                                bool with_regular = true) {
  SeparationReport rep;
  const auto& Y = approx.Y();
  const auto& L = approx.L;
  rep.separated = true;
  for (int l = 0; l < L->size(); ++l) {
    Bitset fibre(Y->size());
    for (int y = 0; y < Y->size(); ++y)
      if (L->leq(l, approx.xi(y))) fibre.set(y);
    if (!Y->is_down_set(fibre)) {
      rep.separated = false;
      rep.separated_counterexample = l;
      break;
    }
  }
  if (!with_regular) return rep;
  if (!rep.separated) {
    rep.regular = false;
    return rep;
  }
  auto ol = opens(L->space(), cfg);
  auto fibre_of = [&](const Bitset& sub) { return approx.xi.preimage(sub); };
  rep.regular = true;
  for (int x = 0; x < L->size() && *rep.regular; ++x)
    for (int v = 0; v < ol.count(); ++v) {
      if (!ol.open_at(v).test(x)) continue;
      bool found = false;
      for (int u = 0; u < ol.count() && !found; ++u) {
        if (!ol.open_at(u).test(x)) continue;
        if (Y->closure(fibre_of(ol.open_at(u))).subset_of(fibre_of(ol.open_at(v))))
          found = true;
      }
      if (!found) {
        rep.regular = false;
        rep.regular_counterexample = {x, ol.open_at(v)};
        break;
      }
    }
  return rep;
}

// Pullback of an approximation space along a continuous map.
inline ApproxSpace pullback_approx(const PointMap& g, const ApproxSpace& approx) {
  if (!g.is_monotone()) throw NotContinuous("pullback needs a continuous map");
  if (!same_space(g.codomain, approx.Y()))
    throw Error("pullback: map must land in the approximated space");
  return ApproxSpace(approx.L, approx.xi.after(g));
}

// K_bot(Y) for finite discrete Y: all subsets ordered by reverse inclusion
// with an adjoined bottom. Finite Hausdorff means discrete, so this is the
// whole finite reach of the construction.
struct CompactsLattice {
  SpacePtr base;
  LatticePtr lattice;
  std::vector<Bitset> payload;  // payload[i] for i >= 1; index 0 is bottom

  int bottom_index() const { return 0; }
  bool is_bottom(int i) const { return i == 0; }
  const Bitset& subset_at(int i) const { return payload[i]; }

  int index_of_subset(const Bitset& s) const {
    for (int i = 1; i < static_cast<int>(payload.size()); ++i)
      if (payload[i] == s) return i;
    throw Error("subset not found in compacts lattice");
  }
  // kappa : Y -> K_bot(Y), y -> {y}.
  PointMap embed_points() const {
    std::vector<int> a(base->size());
    for (int y = 0; y < base->size(); ++y)
      a[y] = index_of_subset(Bitset::single(base->size(), y));
    return PointMap(base, lattice->space(), std::move(a));
  }
  // i_Y(K) = { U open : U contains K }; bottom goes to the empty family.
  UpFamily to_family(int i) const {
    if (is_bottom(i)) return UpFamily::empty(base);
    return UpFamily(base, {base->up_closure(payload[i])});
  }
};

inline CompactsLattice compacts_lattice(const SpacePtr& Y, const Config& cfg = {}) {
  if (!Y->is_discrete())
    throw Error("compacts lattice is only modelled over discrete spaces");
  int n = Y->size();
  if ((1LL << n) + 1 > cfg.cap_lattice)
    throw CapExceeded("lattice", cfg.cap_lattice, (1LL << n) + 1);
  CompactsLattice k;
  k.base = Y;
  std::vector<Bitset> subsets;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Bitset b(n);
    for (int i = 0; i < n; ++i)
      if ((mask >> i) & 1) b.set(i);
    subsets.push_back(std::move(b));
  }
  std::sort(subsets.begin(), subsets.end(), [&](const Bitset& a, const Bitset& b) {
    return Y->subset_sort_key(a) < Y->subset_sort_key(b);
  });
  int m = static_cast<int>(subsets.size()) + 1;
  std::vector<std::string> names(m);
  std::vector<Bitset> up(m, Bitset(m));
  names[0] = "bot";
  k.payload.assign(m, Bitset(n));
  for (int i = 1; i < m; ++i) {
    k.payload[i] = subsets[i - 1];
    names[i] = Y->render_subset(k.payload[i]);
  }
  for (int i = 0; i < m; ++i) up[0].set(i);
  for (int i = 1; i < m; ++i)
    for (int j = 1; j < m; ++j)
      if (k.payload[j].subset_of(k.payload[i])) up[i].set(j);
  k.lattice = Lattice::from_space(
      FinSpace::from_closed_order(std::move(names), std::move(up)), cfg);
  return k;
}

// Kleisli composite of K_bot-valued point maps: pointwise union over the
// value set, with bottom absorbing.
inline PointMap kleisli_compacts(const CompactsLattice& KY,
                                 const CompactsLattice& KZ, const PointMap& F,
                                 const PointMap& G) {
  if (!same_space(F.codomain, KY.lattice->space()) ||
      !same_space(G.codomain, KZ.lattice->space()) ||
      !same_space(G.domain, KY.base))
    throw Error("kleisli_compacts: type mismatch");
  std::vector<int> vals(F.domain->size());
  for (int x = 0; x < F.domain->size(); ++x) {
    if (KY.is_bottom(F(x))) {
      vals[x] = KZ.bottom_index();
      continue;
    }
    Bitset acc(KZ.base->size());
    bool bot = false;
    KY.subset_at(F(x)).for_each([&](int y) {
      if (KZ.is_bottom(G(y)))
        bot = true;
      else
        acc |= KZ.subset_at(G(y));
    });
    vals[x] = bot ? KZ.bottom_index() : KZ.index_of_subset(acc);
  }
  return PointMap(F.domain, KZ.lattice->space(), std::move(vals));
}

}  // namespace envlab

#endif  // ENVLAB_ENVELOPE_HPP
