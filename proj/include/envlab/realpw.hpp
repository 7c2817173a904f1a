#ifndef ENVLAB_REALPW_HPP
#define ENVLAB_REALPW_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "envlab/errors.hpp"
#include "envlab/rational.hpp"

namespace envlab {

struct Affine {
  Rational slope;
  Rational intercept;

  Rational at(const Rational& x) const { return slope * x + intercept; }
  Affine after(const Affine& inner) const {
    return {slope * inner.slope, slope * inner.intercept + intercept};
  }
  friend bool operator==(const Affine& a, const Affine& b) {
    return a.slope == b.slope && a.intercept == b.intercept;
  }
  friend bool operator<(const Affine& a, const Affine& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    return a.intercept < b.intercept;
  }
};

// An exact piecewise-affine function: k breakpoints with explicit values and
// k+1 affine pieces on the open intervals between them.
class PAFunction {
 public:
  struct Breakpoint {
    Rational x;
    Rational value;
  };

  PAFunction(std::vector<Breakpoint> breakpoints, std::vector<Affine> pieces)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i - 1].x < breaks_[i].x))
        throw Error("breakpoints must be strictly increasing");
    if (pieces_.size() != breaks_.size() + 1)
      throw Error("need exactly one piece per open interval");
  }

  static PAFunction affine(const Affine& a) { return PAFunction({}, {a}); }
  static PAFunction identity() { return affine({Rational(1), Rational(0)}); }
  static PAFunction constant(const Rational& c) {
    return affine({Rational(0), c});
  }

  int breakpoint_count() const { return static_cast<int>(breaks_.size()); }
  const std::vector<Breakpoint>& breakpoints() const { return breaks_; }
  const std::vector<Affine>& pieces() const { return pieces_; }

  std::optional<int> breakpoint_index(const Rational& x) const {
    for (std::size_t i = 0; i < breaks_.size(); ++i)
      if (breaks_[i].x == x) return static_cast<int>(i);
    return std::nullopt;
  }
  // Index of the open interval containing x (x must not be a breakpoint),
  // or of the interval whose closure contains it when x is a breakpoint:
  // piece_left gives the interval just left of x, piece_right just right.
  int piece_left(const Rational& x) const {
    int i = 0;
    while (i < breakpoint_count() && breaks_[i].x < x) ++i;
    return i;
  }
  int piece_right(const Rational& x) const {
    int i = 0;
    while (i < breakpoint_count() && !(x < breaks_[i].x)) ++i;
    return i;
  }

  Rational value_at(const Rational& x) const {
    if (auto bi = breakpoint_index(x)) return breaks_[*bi].value;
    return pieces_[piece_left(x)].at(x);
  }

  Rational left_limit(int break_index) const {
    return pieces_[break_index].at(breaks_[break_index].x);
  }
  Rational right_limit(int break_index) const {
    return pieces_[break_index + 1].at(breaks_[break_index].x);
  }

  bool continuous_at_breakpoint(int i) const {
    return left_limit(i) == breaks_[i].value && right_limit(i) == breaks_[i].value;
  }

 private:
  std::vector<Breakpoint> breaks_;
  std::vector<Affine> pieces_;
};

// A finite union of disjoint open rational intervals (endpoints may be
// infinite). This family is a basis of opens and is all the decision
// procedures need.
class RealOpenSet {
 public:
  struct Interval {
    std::optional<Rational> lo;  // nullopt = -infinity
    std::optional<Rational> hi;  // nullopt = +infinity
  };

  RealOpenSet() = default;
  explicit RealOpenSet(std::vector<Interval> comps) {
    for (auto& c : comps)
      if (!(c.lo && c.hi && !(*c.lo < *c.hi))) comps_.push_back(c);
    std::sort(comps_.begin(), comps_.end(), [](const Interval& a, const Interval& b) {
      if (!a.lo) return static_cast<bool>(b.lo);
      if (!b.lo) return false;
      return *a.lo < *b.lo;
    });
    for (std::size_t i = 1; i < comps_.size(); ++i) {
      if (!comps_[i].lo || !comps_[i - 1].hi ||
          !(*comps_[i - 1].hi < *comps_[i].lo || *comps_[i - 1].hi == *comps_[i].lo))
        throw Error("open set components must be disjoint and sorted");
    }
  }

  static RealOpenSet everything() { return RealOpenSet({{std::nullopt, std::nullopt}}); }
  static RealOpenSet above(const Rational& a) {
    return RealOpenSet({{a, std::nullopt}});
  }
  static RealOpenSet below(const Rational& a) {
    return RealOpenSet({{std::nullopt, a}});
  }
  static RealOpenSet between(const Rational& a, const Rational& b) {
    return RealOpenSet({{a, b}});
  }
  static RealOpenSet complement_of_point(const Rational& a) {
    return RealOpenSet({{std::nullopt, a}, {a, std::nullopt}});
  }

  const std::vector<Interval>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }

  bool contains(const Rational& q) const {
    for (const auto& c : comps_)
      if ((!c.lo || *c.lo < q) && (!c.hi || q < *c.hi)) return true;
    return false;
  }
  // Some left punctured neighbourhood (q - eps, q) lies inside the set.
  bool absorbs_from_left(const Rational& q) const {
    for (const auto& c : comps_)
      if ((!c.lo || *c.lo < q) && (!c.hi || q < *c.hi || q == *c.hi)) return true;
    return false;
  }
  // Some right punctured neighbourhood (q, q + eps) lies inside the set.
  bool absorbs_from_right(const Rational& q) const {
    for (const auto& c : comps_)
      if ((!c.lo || *c.lo < q || q == *c.lo) && (!c.hi || q < *c.hi)) return true;
    return false;
  }

  std::string render() const {
    if (comps_.empty()) return "{}";
    std::string s;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
      if (i) s += " u ";
      s += "(" + (comps_[i].lo ? comps_[i].lo->str() : "-inf") + "," +
           (comps_[i].hi ? comps_[i].hi->str() : "+inf") + ")";
    }
    return s;
  }

 private:
  std::vector<Interval> comps_;
};

// A piecewise envelope into K_bot(R): finite sets of affine branches on the
// open intervals and finite value sets at the breakpoints. Cluster envelopes
// additionally carry the enveloped function's value at each breakpoint,
// which the composition needs.
class PAEnvelope {
 public:
  PAEnvelope(std::vector<Rational> breaks,
             std::vector<std::vector<Affine>> branches,
             std::vector<std::vector<Rational>> values,
             std::vector<std::optional<Rational>> attained)
      : breaks_(std::move(breaks)),
        branches_(std::move(branches)),
        values_(std::move(values)),
        attained_(std::move(attained)) {
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i - 1] < breaks_[i]))
        throw Error("breakpoints must be strictly increasing");
    if (branches_.size() != breaks_.size() + 1 ||
        values_.size() != breaks_.size() || attained_.size() != breaks_.size())
      throw Error("envelope table sizes do not line up");
    for (auto& b : branches_) {
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      if (b.empty()) throw Error("each piece needs at least one branch");
    }
    for (auto& v : values_) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      if (v.empty()) throw Error("each breakpoint needs at least one value");
    }
    normalize();
  }

  int breakpoint_count() const { return static_cast<int>(breaks_.size()); }
  const std::vector<Rational>& breakpoints() const { return breaks_; }
  const std::vector<std::vector<Affine>>& branches() const { return branches_; }
  const std::vector<std::vector<Rational>>& values() const { return values_; }
  const std::vector<std::optional<Rational>>& attained() const { return attained_; }

  std::optional<int> breakpoint_index(const Rational& x) const {
    for (std::size_t i = 0; i < breaks_.size(); ++i)
      if (breaks_[i] == x) return static_cast<int>(i);
    return std::nullopt;
  }
  int piece_left(const Rational& x) const {
    int i = 0;
    while (i < breakpoint_count() && breaks_[i] < x) ++i;
    return i;
  }

  std::vector<Rational> value_set_at(const Rational& x) const {
    if (auto bi = breakpoint_index(x)) return values_[*bi];
    std::vector<Rational> out;
    for (const auto& a : branches_[piece_left(x)]) out.push_back(a.at(x));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // The enveloped function's value at x; requires a single branch off the
  // breakpoints and a carried value on them.
  std::optional<Rational> attained_value_at(const Rational& x) const {
    if (auto bi = breakpoint_index(x)) return attained_[*bi];
    const auto& b = branches_[piece_left(x)];
    if (b.size() != 1) return std::nullopt;
    return b[0].at(x);
  }

  bool function_like() const {
    for (const auto& b : branches_)
      if (b.size() != 1) return false;
    for (const auto& a : attained_)
      if (!a) return false;
    return true;
  }

  // Pointwise equality of the value structure (the carried function values
  // do not participate: distinct functions can share an envelope).
  bool equal_pointwise(const PAEnvelope& o) const {
    return breaks_ == o.breaks_ && branches_ == o.branches_ && values_ == o.values_;
  }

  // Equality of the piece tables: the branch sets agree away from the
  // breakpoints of either side. Composition is associative at this level
  // but not on the breakpoint value sets, which carry advice-like extras.
  bool equal_pieces(const PAEnvelope& o) const {
    std::vector<Rational> cuts = breaks_;
    cuts.insert(cuts.end(), o.breaks_.begin(), o.breaks_.end());
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Rational> samples;
    if (cuts.empty())
      samples.push_back(Rational(0));
    else {
      samples.push_back(cuts.front() - Rational(1));
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        samples.push_back((cuts[i] + cuts[i + 1]) / Rational(2));
      samples.push_back(cuts.back() + Rational(1));
    }
    for (const auto& s : samples)
      if (!(branches_[piece_left(s)] == o.branches_[o.piece_left(s)]))
        return false;
    return true;
  }

  // Upper semicontinuity at the breakpoints: each value set must contain the
  // one-sided limits of the adjacent branches. Finite condition, exact.
  bool upper_semicontinuous() const {
    for (int i = 0; i < breakpoint_count(); ++i) {
      for (const auto& a : branches_[i])
        if (!std::count(values_[i].begin(), values_[i].end(), a.at(breaks_[i])))
          return false;
      for (const auto& a : branches_[i + 1])
        if (!std::count(values_[i].begin(), values_[i].end(), a.at(breaks_[i])))
          return false;
    }
    return true;
  }

 private:
  // Drops breakpoints whose removal changes nothing: equal branch sets on
  // both sides and a value set that is exactly the branch values there.
  void normalize() {
    for (int i = breakpoint_count() - 1; i >= 0; --i) {
      if (!(branches_[i] == branches_[i + 1])) continue;
      std::vector<Rational> bv;
      for (const auto& a : branches_[i]) bv.push_back(a.at(breaks_[i]));
      std::sort(bv.begin(), bv.end());
      bv.erase(std::unique(bv.begin(), bv.end()), bv.end());
      if (!(bv == values_[i])) continue;
      if (attained_[i] && !std::count(bv.begin(), bv.end(), *attained_[i])) continue;
      breaks_.erase(breaks_.begin() + i);
      values_.erase(values_.begin() + i);
      attained_.erase(attained_.begin() + i);
      branches_.erase(branches_.begin() + i);
    }
  }

  std::vector<Rational> breaks_;
  std::vector<std::vector<Affine>> branches_;
  std::vector<std::vector<Rational>> values_;
  std::vector<std::optional<Rational>> attained_;
};

// The best continuous K_bot(R)-approximation of a piecewise-affine function:
// the singleton {f(x)} at continuity points and the cluster set
// {left limit, f(b), right limit} at each breakpoint.
inline PAEnvelope cluster_envelope(const PAFunction& f) {
  std::vector<Rational> breaks;
  std::vector<std::vector<Rational>> values;
  std::vector<std::optional<Rational>> attained;
  std::vector<std::vector<Affine>> branches;
  for (int i = 0; i < f.breakpoint_count(); ++i) {
    breaks.push_back(f.breakpoints()[i].x);
    values.push_back(
        {f.left_limit(i), f.breakpoints()[i].value, f.right_limit(i)});
    attained.push_back(f.breakpoints()[i].value);
  }
  for (const auto& p : f.pieces()) branches.push_back({p});
  return PAEnvelope(std::move(breaks), std::move(branches), std::move(values),
                    std::move(attained));
}

// Kleisli-style composition of cluster envelopes. The pieces compose exactly
// (with breakpoint refinement at the preimages of the outer breakpoints
// under each inner branch); a breakpoint's value set collects the outer
// function's values over the inner value set, closed under the composite
// branch limits to keep the result upper semicontinuous. This reproduces
// the asymmetry of the worked examples: the outer values enter through the
// carried function, not through the outer cluster sets.
inline PAEnvelope kleisli_compose(const PAEnvelope& genv, const PAEnvelope& fenv,
                                  const Config& cfg = {}) {
  if (!fenv.function_like() || !genv.function_like())
    throw Error("composition needs envelopes carrying their function values");
  for (const auto& b : fenv.branches())
    if (static_cast<long long>(b.size()) > cfg.cap_branches)
      throw BranchCapExceeded(cfg.cap_branches, static_cast<long long>(b.size()));

  // Composite breakpoints: those of the inner envelope plus exact preimages
  // of the outer breakpoints under each inner branch, piece by piece.
  std::vector<Rational> breaks = fenv.breakpoints();
  int k = fenv.breakpoint_count();
  for (int piece = 0; piece <= k; ++piece) {
    const Affine& phi = fenv.branches()[piece][0];
    if (phi.slope.is_zero()) continue;
    for (const auto& gb : genv.breakpoints()) {
      Rational x = (gb - phi.intercept) / phi.slope;
      bool inside = (piece == 0 || fenv.breakpoints()[piece - 1] < x) &&
                    (piece == k || x < fenv.breakpoints()[piece]);
      if (inside) breaks.push_back(x);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  int m = static_cast<int>(breaks.size());
  std::vector<std::vector<Affine>> branches(m + 1);
  for (int j = 0; j <= m; ++j) {
    // a sample point interior to the j-th composite interval
    Rational sample;
    if (m == 0)
      sample = Rational(0);
    else if (j == 0)
      sample = breaks.front() - Rational(1);
    else if (j == m)
      sample = breaks.back() + Rational(1);
    else
      sample = (breaks[j - 1] + breaks[j]) / Rational(2);
    const Affine& phi = fenv.branches()[fenv.piece_left(sample)][0];
    if (phi.slope.is_zero()) {
      branches[j] = {Affine{Rational(0), *genv.attained_value_at(phi.intercept)}};
    } else {
      Rational y = phi.at(sample);
      const Affine& psi = genv.branches()[genv.piece_left(y)][0];
      branches[j] = {psi.after(phi)};
    }
  }

  std::vector<std::vector<Rational>> values(m);
  std::vector<std::optional<Rational>> attained(m);
  for (int i = 0; i < m; ++i) {
    std::vector<Rational> vals;
    for (const auto& y : fenv.value_set_at(breaks[i]))
      vals.push_back(*genv.attained_value_at(y));
    for (const auto& a : branches[i]) vals.push_back(a.at(breaks[i]));
    for (const auto& a : branches[i + 1]) vals.push_back(a.at(breaks[i]));
    values[i] = std::move(vals);
    attained[i] =
        *genv.attained_value_at(*fenv.attained_value_at(breaks[i]));
  }
  return PAEnvelope(std::move(breaks), std::move(branches), std::move(values),
                    std::move(attained));
}

// Is V a robust property of f at x0, i.e. does f map some neighbourhood of
// x0 into V? Decided from f(x0) and the two adjacent branches.
inline bool is_robust(const PAFunction& f, const Rational& x0,
                      const RealOpenSet& V) {
  if (!V.contains(f.value_at(x0))) return false;
  const Affine& left = f.pieces()[f.piece_left(x0)];
  const Affine& right = f.pieces()[f.piece_right(x0)];
  auto side_ok = [&](const Affine& a, bool left_side) {
    Rational limit = a.at(x0);
    if (a.slope.is_zero()) return V.contains(limit);
    // On the left of x0 a positive slope approaches the limit from below.
    bool from_below = left_side ? a.slope.sign() > 0 : a.slope.sign() < 0;
    return from_below ? V.absorbs_from_left(limit) : V.absorbs_from_right(limit);
  };
  return side_ok(left, true) && side_ok(right, false);
}

struct UniversalityDefect {
  Rational breakpoint;
  Rational orphan_value;
  RealOpenSet witness;
};

// Values in the cluster set at a breakpoint that the function does not
// attain arbitrarily close to it. Each defect comes with a concrete robust
// open set excluding the orphan value; an empty list means the cluster
// envelope is uniformly universal.
inline std::vector<UniversalityDefect> universality_defects(const PAFunction& f) {
  std::vector<UniversalityDefect> out;
  for (int i = 0; i < f.breakpoint_count(); ++i) {
    Rational b = f.breakpoints()[i].x;
    std::vector<Rational> cluster = {f.left_limit(i), f.breakpoints()[i].value,
                                     f.right_limit(i)};
    std::sort(cluster.begin(), cluster.end());
    cluster.erase(std::unique(cluster.begin(), cluster.end()), cluster.end());
    const Affine& left = f.pieces()[i];
    const Affine& right = f.pieces()[i + 1];
    for (const auto& v : cluster) {
      bool attained_nearby =
          v == f.breakpoints()[i].value ||
          (left.slope.is_zero() && left.intercept == v) ||
          (right.slope.is_zero() && right.intercept == v);
      if (attained_nearby) continue;
      // A witness always exists: the complement of the orphan value is
      // robust. Prefer a one-sided ray when one works.
      RealOpenSet witness = RealOpenSet::above(v);
      if (!is_robust(f, b, witness)) {
        witness = RealOpenSet::below(v);
        if (!is_robust(f, b, witness))
          witness = RealOpenSet::complement_of_point(v);
      }
      if (!is_robust(f, b, witness) || witness.contains(v))
        throw Error("internal: defect witness construction failed");
      out.push_back({b, v, witness});
    }
  }
  return out;
}

// The largest rational delta with f((x0-delta, x0+delta)) inside the open
// band of radius eps around f(x0); nullopt at discontinuity points, the
// configured sentinel when every delta works. The supremum is attained
// because the windows are open; the halving fallback guards the contract.
inline std::optional<Rational> local_modulus(const PAFunction& f,
                                             const Rational& x0,
                                             const Rational& eps,
                                             const Config& cfg = {}) {
  if (!(Rational(0) < eps)) throw Error("eps must be positive");
  if (auto bi = f.breakpoint_index(x0))
    if (!f.continuous_at_breakpoint(*bi)) return std::nullopt;
  Rational c = f.value_at(x0);

  std::optional<Rational> best;  // distance to the nearest offending point
  bool zero_distance = false;    // an offending point at x0 itself
  auto propose = [&](const Rational& d) {
    if (d.is_zero()) {
      zero_distance = true;
      return;
    }
    if (!best || d < *best) best = d;
  };

  for (const auto& bp : f.breakpoints()) {
    Rational dev = (bp.value - c).abs();
    if (!(dev < eps)) {
      if (bp.x == x0) return std::nullopt;  // unreachable; kept for safety
      propose((bp.x - x0).abs());
    }
  }
  int k = f.breakpoint_count();
  for (int j = 0; j <= k; ++j) {
    const Affine& a = f.pieces()[j];
    std::optional<Rational> lo, hi;  // closure of the piece interval
    if (j > 0) lo = f.breakpoints()[j - 1].x;
    if (j < k) hi = f.breakpoints()[j].x;
    // distance from x0 to the closed segment [A, B]; open ends are infinite
    auto segment_distance = [&](const std::optional<Rational>& A,
                                const std::optional<Rational>& B) {
      if (A && x0 < *A) return *A - x0;
      if (B && *B < x0) return x0 - *B;
      return Rational(0);
    };
    if (a.slope.is_zero()) {
      if ((a.intercept - c).abs() < eps) continue;
      propose(segment_distance(lo, hi));
      continue;
    }
    // Solutions of a(x) = c -+ eps bound the offending half-lines
    // (.., tl] and [tr, ..) inside the piece.
    Rational t1 = (c - eps - a.intercept) / a.slope;
    Rational t2 = (c + eps - a.intercept) / a.slope;
    Rational tl = Rational::min(t1, t2), tr = Rational::max(t1, t2);
    if (!lo || *lo < tl) {
      std::optional<Rational> B = hi ? Rational::min(tl, *hi) : tl;
      propose(segment_distance(lo, B));
    }
    if (!hi || tr < *hi) {
      std::optional<Rational> A = lo ? Rational::max(tr, *lo) : tr;
      propose(segment_distance(A, hi));
    }
  }

  if (zero_distance) return std::nullopt;
  if (!best)
    return Rational(cfg.modulus_max_delta_num, cfg.modulus_max_delta_den);

  // Validity: the open window of radius best must map into the open band.
  Rational delta = *best;
  auto window_ok = [&](const Rational& d) {
    Rational wl = x0 - d, wr = x0 + d;
    for (const auto& bp : f.breakpoints())
      if (wl < bp.x && bp.x < wr && !((bp.value - c).abs() < eps)) return false;
    for (int j = 0; j <= k; ++j) {
      const Affine& a = f.pieces()[j];
      Rational lo = wl, hi = wr;
      if (j > 0) lo = Rational::max(lo, f.breakpoints()[j - 1].x);
      if (j < k) hi = Rational::min(hi, f.breakpoints()[j].x);
      if (!(lo < hi)) continue;
      if (a.slope.is_zero()) {
        if (!((a.intercept - c).abs() < eps)) return false;
        continue;
      }
      // open-interval image inside open band: closed comparison at the ends
      Rational va = a.at(lo), vb = a.at(hi);
      if (Rational::min(va, vb) < c - eps || c + eps < Rational::max(va, vb))
        return false;
    }
    return true;
  };
  if (!window_ok(delta)) delta = delta / Rational(2);
  if (!window_ok(delta)) throw Error("internal: modulus validation failed");
  return delta;
}

}  // namespace envlab

#endif  // ENVLAB_REALPW_HPP
