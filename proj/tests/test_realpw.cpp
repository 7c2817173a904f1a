#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envlab/realpw.hpp"

using namespace envlab;

namespace {

Rational Q(long long n, long long d = 1) { return Rational(n, d); }

// the worked step functions: negate left of zero, one on the right;
// they differ only in the value taken at zero
PAFunction step_f() {
  return PAFunction({{Q(0), Q(0)}}, {{Q(-1), Q(0)}, {Q(0), Q(1)}});
}
PAFunction step_g() {
  return PAFunction({{Q(0), Q(1)}}, {{Q(-1), Q(0)}, {Q(0), Q(1)}});
}

std::vector<Rational> set_of(std::vector<long long> vs) {
  std::vector<Rational> out;
  for (auto v : vs) out.push_back(Q(v));
  return out;
}

// Validity of an envelope table for a function: every value of f is covered
// and the value sets absorb the adjacent branch limits.
bool valid_envelope_of(const PAFunction& f, const PAEnvelope& env) {
  if (!env.upper_semicontinuous()) return false;
  for (int i = 0; i < f.breakpoint_count(); ++i) {
    auto vals = env.value_set_at(f.breakpoints()[i].x);
    if (!std::count(vals.begin(), vals.end(), f.breakpoints()[i].value))
      return false;
  }
  // sample each refined interval: the function branch must be a branch of env
  std::vector<Rational> cuts;
  for (const auto& b : f.breakpoints()) cuts.push_back(b.x);
  for (const auto& b : env.breakpoints()) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Rational> samples;
  if (cuts.empty())
    samples.push_back(Q(0));
  else {
    samples.push_back(cuts.front() - Q(1));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      samples.push_back((cuts[i] + cuts[i + 1]) / Q(2));
    samples.push_back(cuts.back() + Q(1));
  }
  for (const auto& s : samples) {
    const Affine& fb = f.pieces()[f.piece_left(s)];
    const auto& branches = env.branches()[env.piece_left(s)];
    if (!std::count(branches.begin(), branches.end(), fb)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Q(1, 2) + Q(1, 3) == Q(5, 6));
  CHECK(Q(2, 4) == Q(1, 2));
  CHECK(Q(-1, -2) == Q(1, 2));
  CHECK((Q(1) / Q(3)).str() == "1/3");
  CHECK(Rational::parse("-7/2") == Q(-7, 2));
  CHECK(Rational::parse("5") == Q(5));
  CHECK_THROWS_AS(Rational::parse("x"), ParseError);
  CHECK_THROWS_AS(Q(1) / Q(0), ArithmeticOverflow);
  CHECK(Q(1, 3) < Q(1, 2));
}

TEST_CASE("cluster envelopes of the step functions") {
  auto F = cluster_envelope(step_f());
  REQUIRE(F.breakpoint_count() == 1);
  CHECK(F.breakpoints()[0] == Q(0));
  CHECK(F.values()[0] == set_of({0, 1}));
  CHECK(F.value_set_at(Q(-2)) == std::vector<Rational>{Q(2)});
  CHECK(F.value_set_at(Q(3)) == std::vector<Rational>{Q(1)});

  auto G = cluster_envelope(step_g());
  CHECK(G.values()[0] == set_of({0, 1}));
  CHECK(F.equal_pointwise(G));
  // the carried function values differ even though the envelopes agree
  CHECK(*F.attained()[0] == Q(0));
  CHECK(*G.attained()[0] == Q(1));

  // globally affine: singleton everywhere, no breakpoints survive
  auto A = cluster_envelope(PAFunction::affine({Q(2), Q(1)}));
  CHECK(A.breakpoint_count() == 0);
  CHECK(A.value_set_at(Q(5)) == std::vector<Rational>{Q(11)});

  // an artificial breakpoint on a continuous function normalises away
  PAFunction cont({{Q(0), Q(0)}}, {{Q(1), Q(0)}, {Q(1), Q(0)}});
  CHECK(cluster_envelope(cont).breakpoint_count() == 0);
}

TEST_CASE("envelope maximality at breakpoints") {
  for (const auto& f : {step_f(), step_g()}) {
    auto env = cluster_envelope(f);
    REQUIRE(valid_envelope_of(f, env));
    for (int i = 0; i < env.breakpoint_count(); ++i) {
      // removing any value breaks validity
      for (std::size_t k = 0; k < env.values()[i].size(); ++k) {
        auto vals = env.values();
        vals[i].erase(vals[i].begin() + k);
        if (vals[i].empty()) continue;
        PAEnvelope poked(env.breakpoints(), env.branches(), vals, env.attained());
        CHECK_FALSE(valid_envelope_of(f, poked));
      }
      // adding a value keeps validity but loses exactness
      auto vals = env.values();
      vals[i].push_back(Q(7));
      PAEnvelope padded(env.breakpoints(), env.branches(), vals, env.attained());
      CHECK(valid_envelope_of(f, padded));
      CHECK_FALSE(padded.equal_pointwise(env));
    }
  }
}

TEST_CASE("composites of the step functions") {
  auto F = cluster_envelope(step_f());
  auto G = cluster_envelope(step_g());

  // G after F is constantly {1}: the composite function g o f is constant
  // and the envelope detects it
  auto GF = kleisli_compose(G, F);
  CHECK(GF.breakpoint_count() == 0);
  for (auto x : {Q(-2), Q(-1), Q(0), Q(1, 2), Q(3)})
    CHECK(GF.value_set_at(x) == std::vector<Rational>{Q(1)});
  REQUIRE(GF.branches().size() == 1);
  CHECK(GF.branches()[0] == std::vector<Affine>{Affine{Q(0), Q(1)}});

  // F after G keeps the phantom value at zero
  auto FG = kleisli_compose(F, G);
  REQUIRE(FG.breakpoint_count() == 1);
  CHECK(FG.breakpoints()[0] == Q(0));
  CHECK(FG.values()[0] == set_of({0, 1}));
  for (auto x : {Q(-2), Q(-1), Q(1, 2), Q(3)})
    CHECK(FG.value_set_at(x) == std::vector<Rational>{Q(1)});
  CHECK(FG.branches()[0] == std::vector<Affine>{Affine{Q(0), Q(1)}});
  CHECK(FG.branches()[1] == std::vector<Affine>{Affine{Q(0), Q(1)}});
}

TEST_CASE("composition unit laws and associativity") {
  auto I = cluster_envelope(PAFunction::identity());
  auto F = cluster_envelope(step_f());
  auto G = cluster_envelope(step_g());

  CHECK(kleisli_compose(I, F).equal_pointwise(F));
  CHECK(kleisli_compose(F, I).equal_pointwise(F));
  CHECK(kleisli_compose(I, G).equal_pointwise(G));
  CHECK(kleisli_compose(G, I).equal_pointwise(G));

  // associativity holds for the piece tables; the breakpoint value sets can
  // differ because they carry information beyond the underlying function
  auto scale = cluster_envelope(PAFunction::affine({Q(1, 2), Q(1)}));
  std::vector<PAEnvelope> pool = {F, G, I, scale};
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool) {
        auto left = kleisli_compose(kleisli_compose(a, b), c);
        auto right = kleisli_compose(a, kleisli_compose(b, c));
        CHECK(left.equal_pieces(right));
      }
  // a witnessed value-level divergence: composing the identity on the right
  // cannot reconstruct phantom breakpoint values of an earlier composite
  auto FG = kleisli_compose(F, G);
  CHECK(FG.equal_pieces(kleisli_compose(FG, I)));
  CHECK(kleisli_compose(F, kleisli_compose(G, I)).equal_pointwise(FG));
}

TEST_CASE("composite with breakpoint refinement") {
  // inner map crosses the outer breakpoint at x = 2: slope 1, intercept -2
  PAFunction inner = PAFunction::affine({Q(1), Q(-2)});
  auto In = cluster_envelope(inner);
  auto G = cluster_envelope(step_g());
  auto C = kleisli_compose(G, In);
  REQUIRE(C.breakpoint_count() == 1);
  CHECK(C.breakpoints()[0] == Q(2));
  // left of 2: g(x-2) = -(x-2) = -x+2; right: 1
  CHECK(C.branches()[0] == std::vector<Affine>{Affine{Q(-1), Q(2)}});
  CHECK(C.branches()[1] == std::vector<Affine>{Affine{Q(0), Q(1)}});
  CHECK(C.values()[0] == set_of({0, 1}));
  CHECK(*C.attained()[0] == Q(1));  // g(inner(2)) = g(0) = 1

  // zero-slope inner branch sitting on an outer breakpoint
  PAFunction zero = PAFunction::constant(Q(0));
  auto Z = cluster_envelope(zero);
  auto CZ = kleisli_compose(G, Z);
  CHECK(CZ.breakpoint_count() == 0);
  CHECK(CZ.value_set_at(Q(5)) == std::vector<Rational>{Q(1)});  // g(0) = 1
}

TEST_CASE("robustness decisions") {
  auto f = step_f();
  auto g = step_g();

  CHECK(is_robust(g, Q(0), RealOpenSet::above(Q(0))));
  CHECK_FALSE(is_robust(f, Q(0), RealOpenSet::above(Q(0))));
  CHECK(is_robust(f, Q(0), RealOpenSet::everything()));
  CHECK(is_robust(g, Q(0), RealOpenSet::everything()));

  // away from the breakpoint: a narrow band around the value works
  CHECK(is_robust(f, Q(-3), RealOpenSet::between(Q(2), Q(4))));
  CHECK_FALSE(is_robust(f, Q(-3), RealOpenSet::between(Q(4), Q(5))));

  // two-sided approach through a punctured set
  CHECK(is_robust(g, Q(0), RealOpenSet::complement_of_point(Q(0))));
  CHECK_FALSE(is_robust(f, Q(0), RealOpenSet::complement_of_point(Q(0))));
}

TEST_CASE("universality defects") {
  auto f = step_f();
  CHECK(universality_defects(f).empty());

  auto g = step_g();
  auto defects = universality_defects(g);
  REQUIRE(defects.size() == 1);
  CHECK(defects[0].breakpoint == Q(0));
  CHECK(defects[0].orphan_value == Q(0));
  CHECK(defects[0].witness.render() == "(0,+inf)");

  // continuous functions have no defects
  CHECK(universality_defects(PAFunction::affine({Q(3), Q(-1)})).empty());

  // a two-sided orphan needs the punctured witness: the identity with a
  // spiked value at zero never attains zero nearby
  PAFunction spike({{Q(0), Q(5)}}, {{Q(1), Q(0)}, {Q(1), Q(0)}});
  auto d2 = universality_defects(spike);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].orphan_value == Q(0));
  CHECK(d2[0].witness.render() == "(-inf,0) u (0,+inf)");
}

TEST_CASE("robustness and defect coherence") {
  // defects empty iff every robust generated open absorbs the cluster set
  for (const auto& f : {step_f(), step_g()}) {
    auto env = cluster_envelope(f);
    bool all_witnessed = true;
    for (int i = 0; i < f.breakpoint_count(); ++i) {
      Rational b = f.breakpoints()[i].x;
      std::vector<Rational> anchors = env.value_set_at(b);
      std::vector<Rational> ends;
      for (const auto& a : anchors)
        for (const auto& d : {Q(-1), Q(-1, 2), Q(1, 2), Q(1)})
          ends.push_back(a + d);
      for (const auto& lo : ends)
        for (const auto& hi : ends) {
          if (!(lo < hi)) continue;
          RealOpenSet V = RealOpenSet::between(lo, hi);
          if (!is_robust(f, b, V)) continue;
          for (const auto& v : env.value_set_at(b))
            if (!V.contains(v)) all_witnessed = false;
        }
    }
    CHECK(all_witnessed == universality_defects(f).empty());
  }
}

TEST_CASE("local modulus") {
  // slope two, tolerance one: delta is one half
  auto f2 = PAFunction::affine({Q(2), Q(0)});
  auto d = local_modulus(f2, Q(3), Q(1));
  REQUIRE(d.has_value());
  CHECK(*d == Q(1, 2));

  // discontinuity: no modulus
  CHECK_FALSE(local_modulus(step_f(), Q(0), Q(1)).has_value());
  CHECK_FALSE(local_modulus(step_g(), Q(0), Q(1, 2)).has_value());

  // constant: the sentinel radius
  auto dc = local_modulus(PAFunction::constant(Q(4)), Q(0), Q(1, 100));
  REQUIRE(dc.has_value());
  CHECK(*dc == Q(1));

  // slope-limited case away from the jump
  auto dg = local_modulus(step_g(), Q(-2), Q(1, 2));
  REQUIRE(dg.has_value());
  CHECK(*dg == Q(1, 2));

  // jump-limited case: flat approach to a distant jump
  PAFunction jump({{Q(0), Q(5)}}, {{Q(0), Q(0)}, {Q(0), Q(5)}});
  auto dj = local_modulus(jump, Q(-2), Q(1, 2));
  REQUIRE(dj.has_value());
  CHECK(*dj == Q(2));

  // the nearest offending point is the piece boundary, not the band crossing
  PAFunction far_jump({{Q(1), Q(0)}}, {{Q(0), Q(0)}, {Q(1), Q(-10)}});
  auto df = local_modulus(far_jump, Q(0), Q(1, 2));
  REQUIRE(df.has_value());
  CHECK(*df == Q(1));

  // a constant piece sitting exactly on the open band edge offends
  PAFunction edge({{Q(1), Q(0)}}, {{Q(0), Q(0)}, {Q(0), Q(1, 2)}});
  auto de = local_modulus(edge, Q(0), Q(1, 2));
  REQUIRE(de.has_value());
  CHECK(*de == Q(1));

  // continuous piecewise function: modulus bounded by slope and distance
  PAFunction vee({{Q(0), Q(0)}}, {{Q(-1), Q(0)}, {Q(1), Q(0)}});
  auto dv = local_modulus(vee, Q(1), Q(1, 2));
  REQUIRE(dv.has_value());
  CHECK(*dv == Q(1, 2));
  auto dv0 = local_modulus(vee, Q(0), Q(1, 4));
  REQUIRE(dv0.has_value());
  CHECK(*dv0 == Q(1, 4));

  CHECK_THROWS_AS(local_modulus(vee, Q(0), Q(0)), Error);
}
