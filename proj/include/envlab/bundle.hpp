#ifndef ENVLAB_BUNDLE_HPP
#define ENVLAB_BUNDLE_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envlab/envelope.hpp"

namespace envlab {

// An advice bundle over Y: a complete lattice A with a projection
// pi : A -> O(Y) preserving finite meets and arbitrary joins, together with
// a continuous section. Fibres of pi are "opens enriched with extra
// verification information".
struct AdviceBundle {
  LatticePtr A;
  SpacePtr Y;
  OpensLattice opens_y;
  LatticePtr OY;           // O(Y) as a lattice
  std::vector<int> pi;     // A element -> opens_y index
  std::vector<int> sigma;  // opens_y index -> A element

  AdviceBundle() = default;
  AdviceBundle(LatticePtr a, SpacePtr y, OpensLattice oy, LatticePtr oyl,
               std::vector<int> p, std::vector<int> s)
      : A(std::move(a)),
        Y(std::move(y)),
        opens_y(std::move(oy)),
        OY(std::move(oyl)),
        pi(std::move(p)),
        sigma(std::move(s)) {
    validate();
  }

  const Bitset& open_of(int a) const { return opens_y.open_at(pi[a]); }

 private:
  void validate() const {
    int n = A->size();
    if (static_cast<int>(pi.size()) != n ||
        static_cast<int>(sigma.size()) != opens_y.count())
      throw NotABundle("projection/section not total");
    auto meet_oy = [&](int u, int v) {
      return opens_y.index_of(opens_y.open_at(u) & opens_y.open_at(v));
    };
    auto join_oy = [&](int u, int v) {
      return opens_y.index_of(opens_y.open_at(u) | opens_y.open_at(v));
    };
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (A->leq(a, b) &&
            !opens_y.open_at(pi[a]).subset_of(opens_y.open_at(pi[b])))
          throw NotABundle("pi not monotone");
        if (pi[A->meet(a, b)] != meet_oy(pi[a], pi[b]))
          throw NotABundle("pi does not preserve binary meets");
        if (pi[A->join(a, b)] != join_oy(pi[a], pi[b]))
          throw NotABundle("pi does not preserve binary joins");
      }
    if (pi[A->bottom()] != opens_y.empty_index())
      throw NotABundle("pi does not preserve the empty join");
    if (pi[A->top()] != opens_y.full_index())
      throw NotABundle("pi does not preserve the empty meet");
    for (int u = 0; u < opens_y.count(); ++u) {
      if (pi[sigma[u]] != u) throw NotASection("pi o sigma is not the identity");
      for (int v = 0; v < opens_y.count(); ++v)
        if (opens_y.open_at(u).subset_of(opens_y.open_at(v)) &&
            !A->leq(sigma[u], sigma[v]))
          throw NotASection("sigma not continuous");
    }
  }
};

// The relation lattice L_f: pairs (U, V) with U open in X, V open in Y and
// U inside f^{-1}(V), ordered componentwise.
struct RelationLattice {
  PointMap f;
  OpensLattice opens_x, opens_y;
  LatticePtr lattice;
  std::vector<std::pair<int, int>> pairs;  // (opens_x index, opens_y index)

  int index_of(int ux, int vy) const {
    auto it = index_.find({ux, vy});
    if (it == index_.end()) throw Error("pair not in relation lattice");
    return it->second;
  }
  int fibre_of(int element) const { return pairs[element].second; }

  friend RelationLattice relation_lattice(const PointMap&, const Config&);

 private:
  std::map<std::pair<int, int>, int> index_;
};

inline RelationLattice relation_lattice(const PointMap& f, const Config& cfg = {}) {
  RelationLattice lf;
  lf.f = f;
  lf.opens_x = opens(f.domain, cfg);
  lf.opens_y = opens(f.codomain, cfg);
  for (int v = 0; v < lf.opens_y.count(); ++v) {
    Bitset pre = f.preimage(lf.opens_y.open_at(v));
    for (int u = 0; u < lf.opens_x.count(); ++u)
      if (lf.opens_x.open_at(u).subset_of(pre)) lf.pairs.push_back({u, v});
  }
  long long n = static_cast<long long>(lf.pairs.size());
  if (n > cfg.cap_lattice) throw CapExceeded("lattice", cfg.cap_lattice, n);
  std::vector<std::string> names(n);
  std::vector<Bitset> up(n, Bitset(static_cast<int>(n)));
  for (int i = 0; i < n; ++i) {
    names[i] = "(" + f.domain->render_subset(lf.opens_x.open_at(lf.pairs[i].first)) +
               "," +
               f.codomain->render_subset(lf.opens_y.open_at(lf.pairs[i].second)) +
               ")";
    lf.index_[lf.pairs[i]] = i;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (lf.opens_x.open_at(lf.pairs[i].first)
              .subset_of(lf.opens_x.open_at(lf.pairs[j].first)) &&
          lf.opens_y.open_at(lf.pairs[i].second)
              .subset_of(lf.opens_y.open_at(lf.pairs[j].second)))
        up[i].set(j);
  lf.lattice = Lattice::from_space(
      FinSpace::from_closed_order(std::move(names), std::move(up)), cfg);
  return lf;
}

// Descending fixpoint solver: starting from a pointwise ceiling, repair
// monotonicity violations by meets until stable. The result is the greatest
// monotone self-map below the ceiling: any monotone competitor stays below
// through every repair step.
inline std::vector<int> descending_selfmap_solver(const Lattice& L,
                                                  std::vector<int> h) {
  int n = L.size();
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (!L.leq(a, b)) continue;
        if (!L.leq(h[a], h[b])) {
          h[a] = L.meet(h[a], h[b]);
          changed = true;
        }
      }
  }
  return h;
}

// The greatest continuous fibre-preserving self-map P_f of L_f. The ceiling
// is the pointwise-greatest fibre-respecting assignment (the join of each
// fibre, found by scanning); the componentwise meets used by the repair loop
// stay inside the fibres because the fibre map is monotone.
inline PointMap greatest_fibre_selfmap(const RelationLattice& lf) {
  const Lattice& L = *lf.lattice;
  int n = L.size();
  std::vector<int> fibre_top(lf.opens_y.count(), -1);
  for (int a = 0; a < n; ++a) {
    int v = lf.fibre_of(a);
    fibre_top[v] = fibre_top[v] < 0 ? a : L.join(fibre_top[v], a);
  }
  std::vector<int> ceiling(n);
  for (int a = 0; a < n; ++a) ceiling[a] = fibre_top[lf.fibre_of(a)];
  std::vector<int> h = descending_selfmap_solver(L, std::move(ceiling));
  for (int a = 0; a < n; ++a) {
    if (lf.fibre_of(h[a]) != lf.fibre_of(a))
      throw Error("fibre preservation lost during repair");
    if (h[h[a]] != h[a]) throw Error("projection not idempotent");
  }
  return PointMap(L.space(), L.space(), std::move(h));
}

// The least advice bundle of f: the range of P_f with the projection to O(Y)
// and its canonical section sigma(V) = P_f(empty, V).
struct LeastAdviceBundle {
  RelationLattice lf;
  PointMap P;                    // idempotent projection on L_f
  AdviceBundle bundle;           // the range, as a bundle over Y
  std::vector<int> range_elems;  // bundle element -> L_f element
  std::vector<int> retract;      // L_f element -> bundle element
  bool iso_to_opens = false;     // pi : A_f -> O(Y) is an order-iso (tested)

  int pair_u(int a) const { return lf.pairs[range_elems[a]].first; }
  int pair_v(int a) const { return lf.pairs[range_elems[a]].second; }
};

inline LeastAdviceBundle advice_bundle(const PointMap& f, const Config& cfg = {}) {
  LeastAdviceBundle out;
  out.lf = relation_lattice(f, cfg);
  out.P = greatest_fibre_selfmap(out.lf);
  const Lattice& L = *out.lf.lattice;
  int n = L.size();
  out.retract.assign(n, -1);
  for (int a = 0; a < n; ++a)
    if (out.P(a) == a) {
      out.retract[a] = static_cast<int>(out.range_elems.size());
      out.range_elems.push_back(a);
    }
  for (int a = 0; a < n; ++a) out.retract[a] = out.retract[out.P(a)];
  int m = static_cast<int>(out.range_elems.size());
  std::vector<std::string> names(m);
  std::vector<Bitset> up(m, Bitset(m));
  for (int i = 0; i < m; ++i) names[i] = L.space()->name(out.range_elems[i]);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (L.leq(out.range_elems[i], out.range_elems[j])) up[i].set(j);
  auto A = Lattice::from_space(
      FinSpace::from_closed_order(std::move(names), std::move(up)), cfg);
  std::vector<int> pi(m);
  for (int i = 0; i < m; ++i) pi[i] = out.lf.fibre_of(out.range_elems[i]);
  std::vector<int> sigma(out.lf.opens_y.count());
  int empty_x = out.lf.opens_x.empty_index();
  for (int v = 0; v < out.lf.opens_y.count(); ++v)
    sigma[v] = out.retract[out.P(out.lf.index_of(empty_x, v))];
  out.bundle = AdviceBundle(A, f.codomain, out.lf.opens_y,
                            opens_lattice(out.lf.opens_y, cfg), std::move(pi),
                            std::move(sigma));
  // Order-isomorphism of pi onto O(Y); a theorem in the finite model.
  out.iso_to_opens = (m == out.lf.opens_y.count());
  if (out.iso_to_opens)
    for (int i = 0; i < m && out.iso_to_opens; ++i)
      for (int j = 0; j < m; ++j) {
        bool le_a = A->leq(i, j);
        bool le_o = out.lf.opens_y.open_at(out.bundle.pi[i])
                        .subset_of(out.lf.opens_y.open_at(out.bundle.pi[j]));
        if (le_a != le_o) {
          out.iso_to_opens = false;
          break;
        }
      }
  return out;
}

// Greatest continuous lift along a join-preserving retraction:
// given rho : C -> B with continuous section sigma and phi : A -> B, the map
// lift(a) = join { c : rho(c) <= phi(a) } is the greatest continuous map
// with rho o lift = phi.
inline PointMap greatest_lift(const LatticePtr& C, const LatticePtr& B,
                              const PointMap& rho, const PointMap& sigma,
                              const LatticePtr& A, const PointMap& phi) {
  if (!same_space(rho.domain, C->space()) || !same_space(rho.codomain, B->space()))
    throw Error("greatest_lift: rho must map C to B");
  if (!rho.is_monotone() || !sigma.is_monotone())
    throw NotContinuous("greatest_lift: rho and sigma must be continuous");
  for (int b = 0; b < B->size(); ++b)
    if (rho(sigma(b)) != b) throw NotASection("rho o sigma is not the identity");
  for (int c = 0; c < C->size(); ++c)
    for (int d = 0; d < C->size(); ++d)
      if (rho(C->join(c, d)) != B->join(rho(c), rho(d)))
        throw NotJoinPreserving("rho does not preserve binary joins");
  if (rho(C->bottom()) != B->bottom())
    throw NotJoinPreserving("rho does not preserve the empty join");
  if (!same_space(phi.domain, A->space()) || !same_space(phi.codomain, B->space()))
    throw Error("greatest_lift: phi must map A to B");
  if (!phi.is_monotone()) throw NotContinuous("greatest_lift: phi not continuous");
  std::vector<int> vals(A->size());
  for (int a = 0; a < A->size(); ++a) {
    int acc = C->bottom();
    for (int c = 0; c < C->size(); ++c)
      if (B->leq(rho(c), phi(a))) acc = C->join(acc, c);
    vals[a] = acc;
  }
  PointMap lift(A->space(), C->space(), std::move(vals));
  for (int a = 0; a < A->size(); ++a)
    if (rho(lift(a)) != phi(a))
      throw Error("lift does not project back to phi");
  return lift;
}

// A co-envelope of f over a bundle: continuous Fstar : A -> O(X) with
// Fstar <= int_f o pi.
struct CoEnvelope {
  AdviceBundle bundle;
  PointMap f;
  std::vector<Bitset> fstar;  // A element -> open of X

  CoEnvelope() = default;
  CoEnvelope(AdviceBundle b, PointMap fn, std::vector<Bitset> rows)
      : bundle(std::move(b)), f(std::move(fn)), fstar(std::move(rows)) {
    if (static_cast<int>(fstar.size()) != bundle.A->size())
      throw Error("CoEnvelope: one row per bundle element");
    const auto& X = f.domain;
    for (int a = 0; a < bundle.A->size(); ++a) {
      if (!X->is_up_set(fstar[a])) throw Error("CoEnvelope: row not open");
      Bitset bound = X->interior(f.preimage(bundle.open_of(a)));
      if (!fstar[a].subset_of(bound))
        throw NotAnEnvelope("CoEnvelope: row above int f o pi");
    }
    for (int a = 0; a < bundle.A->size(); ++a)
      for (int b2 = 0; b2 < bundle.A->size(); ++b2)
        if (bundle.A->leq(a, b2) && !fstar[a].subset_of(fstar[b2]))
          throw NotContinuous("CoEnvelope: rows not monotone");
  }
};

// The principal A-co-envelope: the greatest monotone map below
// a -> int f^{-1}(pi(a)), i.e. the meet over the up-closure.
inline CoEnvelope principal_coenvelope(const PointMap& f,
                                       const AdviceBundle& bundle) {
  if (!same_space(bundle.Y, f.codomain))
    throw NotABundle("bundle lives over the wrong space");
  const auto& X = f.domain;
  int n = bundle.A->size();
  std::vector<Bitset> rows(n);
  for (int a = 0; a < n; ++a) {
    Bitset acc = Bitset::full(X->size());
    bundle.A->space()->up_of(a).for_each([&](int ap) {
      acc &= X->interior(f.preimage(bundle.open_of(ap)));
    });
    rows[a] = acc;
  }
  return CoEnvelope(bundle, f, std::move(rows));
}

// Composition of primary co-envelopes: coF over A_f of f : X -> Y composed
// with coG over A_g of g : Y -> Z gives the map
//   A_g -> O(X),  a -> Fstar(lift(a))
// where lift is the greatest continuous lift of coG's rows along pi_{A_f}.
struct ComposedCoEnvelope {
  AdviceBundle bundle;        // A_g
  std::vector<Bitset> rows;   // A_g element -> open of X
  PointMap lift;              // A_g -> A_f
};

inline ComposedCoEnvelope compose_coenvelopes(const CoEnvelope& coF,
                                              const CoEnvelope& coG) {
  if (!same_space(coF.f.codomain, coG.f.domain))
    throw Error("compose_coenvelopes: functions do not chain");
  const AdviceBundle& Af = coF.bundle;
  const AdviceBundle& Ag = coG.bundle;
  // coG's rows are opens of Y; present them as a map A_g -> O(Y).
  std::vector<int> phi_idx(Ag.A->size());
  for (int a = 0; a < Ag.A->size(); ++a)
    phi_idx[a] = Af.opens_y.index_of(coG.fstar[a]);
  PointMap phi(Ag.A->space(), Af.OY->space(), std::move(phi_idx));
  std::vector<int> rho_idx(Af.A->size());
  for (int c = 0; c < Af.A->size(); ++c) rho_idx[c] = Af.pi[c];
  PointMap rho(Af.A->space(), Af.OY->space(), std::move(rho_idx));
  std::vector<int> sig_idx(Af.OY->size());
  for (int v = 0; v < Af.OY->size(); ++v) sig_idx[v] = Af.sigma[v];
  PointMap sig(Af.OY->space(), Af.A->space(), std::move(sig_idx));
  ComposedCoEnvelope out;
  out.bundle = Ag;
  out.lift = greatest_lift(Af.A, Af.OY, rho, sig, Ag.A, phi);
  out.rows.resize(Ag.A->size());
  for (int a = 0; a < Ag.A->size(); ++a) out.rows[a] = coF.fstar[out.lift(a)];
  return out;
}

// Envelope -> co-envelope duality: the bundle is O(L) with projection
// xi^* and the co-envelope is F^*. Requires xi^* to admit a continuous
// section, which is checked.
inline CoEnvelope duality(const Envelope& e, const Config& cfg = {}) {
  const auto& L = e.approx.L;
  const auto& Y = e.approx.Y();
  auto ol = opens(L->space(), cfg);
  auto A = opens_lattice(ol, cfg);
  auto oy = opens(Y, cfg);
  auto OY = opens_lattice(oy, cfg);
  int n = ol.count();
  std::vector<int> pi(n);
  for (int w = 0; w < n; ++w)
    pi[w] = oy.index_of(e.approx.xi.preimage(ol.open_at(w)));
  // Candidate section: the union of all opens of L whose preimage stays
  // inside V. It is a section iff its preimage is exactly V.
  std::vector<int> sigma(oy.count());
  for (int v = 0; v < oy.count(); ++v) {
    Bitset acc(L->size());
    for (int w = 0; w < n; ++w)
      if (e.approx.xi.preimage(ol.open_at(w)).subset_of(oy.open_at(v)))
        acc |= ol.open_at(w);
    if (!(e.approx.xi.preimage(acc) == oy.open_at(v)))
      throw NotABundle("xi^* has no continuous section");
    sigma[v] = ol.index_of(acc);
  }
  AdviceBundle bundle(A, Y, oy, OY, std::move(pi), std::move(sigma));
  std::vector<Bitset> rows(n);
  for (int w = 0; w < n; ++w) rows[w] = e.F.preimage(ol.open_at(w));
  return CoEnvelope(std::move(bundle), e.f, std::move(rows));
}

// Co-envelope -> envelope duality: the approximation space is O(A) with
// inclusion y -> { a : y in pi(a) } and envelope x -> { a : x in Fstar(a) }.
inline Envelope duality_inv(const CoEnvelope& c, const Config& cfg = {}) {
  const auto& A = c.bundle.A;
  auto oa = opens(A->space(), cfg);
  auto Lp = opens_lattice(oa, cfg);
  const auto& Y = c.bundle.Y;
  const auto& X = c.f.domain;
  std::vector<int> xi(Y->size());
  for (int y = 0; y < Y->size(); ++y) {
    Bitset up(A->size());
    for (int a = 0; a < A->size(); ++a)
      if (c.bundle.open_of(a).test(y)) up.set(a);
    xi[y] = oa.index_of(up);
  }
  std::vector<int> F(X->size());
  for (int x = 0; x < X->size(); ++x) {
    Bitset up(A->size());
    for (int a = 0; a < A->size(); ++a)
      if (c.fstar[a].test(x)) up.set(a);
    F[x] = oa.index_of(up);
  }
  ApproxSpace approx(Lp, PointMap(Y, Lp->space(), std::move(xi)));
  return Envelope(approx, PointMap(X, Lp->space(), std::move(F)), c.f);
}

inline bool is_distributive(const Lattice& L) {
  int n = L.size();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        if (L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c)))
          return false;
  return true;
}

}  // namespace envlab

#endif  // ENVLAB_BUNDLE_HPP
