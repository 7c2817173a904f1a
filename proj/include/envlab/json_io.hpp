#ifndef ENVLAB_JSON_IO_HPP
#define ENVLAB_JSON_IO_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "envlab/envelope.hpp"
#include "envlab/finspace.hpp"
#include "envlab/realpw.hpp"

namespace envlab {

// Reports must be byte-identical for identical inputs, so everything is
// emitted through ordered_json with fixed key order.
using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "envlab/1";

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline void check_schema(const Json& j, const std::string& what) {
  if (j.contains("schema") && j["schema"] != kSchema)
    throw ParseError(what + ": unsupported schema '" +
                     j["schema"].get<std::string>() + "'");
}

// ---- spaces ----------------------------------------------------------

// {"elements": ["a","b"], "le": [["a","b"]]}
inline SpacePtr space_from_json(const Json& j) {
  check_schema(j, "space");
  if (!j.contains("elements") || !j["elements"].is_array())
    throw ParseError("space: missing 'elements' array");
  std::vector<std::string> names;
  for (const auto& e : j["elements"]) names.push_back(e.get<std::string>());
  std::vector<std::pair<int, int>> pairs;
  auto index = [&](const std::string& n) {
    for (int i = 0; i < static_cast<int>(names.size()); ++i)
      if (names[i] == n) return i;
    throw ParseError("space: 'le' references unknown element '" + n + "'");
  };
  if (j.contains("le")) {
    for (const auto& p : j["le"]) {
      if (!p.is_array() || p.size() != 2)
        throw ParseError("space: 'le' entries must be pairs");
      pairs.push_back({index(p[0].get<std::string>()), index(p[1].get<std::string>())});
    }
  }
  return FinSpace::from_order(std::move(names), pairs);
}

inline Json space_to_json(const SpacePtr& s) {
  Json j;
  j["elements"] = Json::array();
  for (const auto& n : s->names()) j["elements"].push_back(n);
  j["le"] = Json::array();
  for (int a = 0; a < s->size(); ++a)
    for (int b = 0; b < s->size(); ++b)
      if (a != b && s->le(a, b)) j["le"].push_back({s->name(a), s->name(b)});
  return j;
}

// ---- maps ------------------------------------------------------------

// {"domain": <space>, "codomain": <space>, "map": {"a": "x"}}
inline PointMap map_from_json(const Json& j) {
  check_schema(j, "map");
  if (!j.contains("domain") || !j.contains("codomain") || !j.contains("map"))
    throw ParseError("map: needs 'domain', 'codomain' and 'map'");
  SpacePtr dom = space_from_json(j["domain"]);
  SpacePtr cod = space_from_json(j["codomain"]);
  std::vector<int> a(dom->size(), -1);
  for (const auto& [k, v] : j["map"].items())
    a[dom->index_of(k)] = cod->index_of(v.get<std::string>());
  for (int i = 0; i < dom->size(); ++i)
    if (a[i] < 0)
      throw ParseError("map: no value for element '" + dom->name(i) + "'");
  return PointMap(dom, cod, std::move(a));
}

inline Json map_to_json(const PointMap& f) {
  Json j;
  j["domain"] = space_to_json(f.domain);
  j["codomain"] = space_to_json(f.codomain);
  Json m = Json::object();
  for (int i = 0; i < f.domain->size(); ++i)
    m[f.domain->name(i)] = f.codomain->name(f(i));
  j["map"] = std::move(m);
  return j;
}

// ---- open sets and families -------------------------------------------

inline Json open_to_json(const SpacePtr& s, const Bitset& open) {
  auto [card, names] = s->subset_sort_key(open);
  (void)card;
  Json arr = Json::array();
  for (const auto& n : names) arr.push_back(n);
  return arr;
}

inline Bitset open_from_json(const SpacePtr& s, const Json& arr) {
  Bitset b(s->size());
  for (const auto& n : arr) b.set(s->index_of(n.get<std::string>()));
  if (!s->is_up_set(b)) throw ParseError("subset is not open (not up-closed)");
  return b;
}

inline Json family_to_json(const UpFamily& fam) {
  Json arr = Json::array();
  for (const auto& g : fam.antichain())
    arr.push_back(open_to_json(fam.space(), g));
  return arr;
}

inline UpFamily family_from_json(const SpacePtr& s, const Json& arr) {
  std::vector<Bitset> gens;
  for (const auto& g : arr) gens.push_back(open_from_json(s, g));
  return UpFamily(s, std::move(gens));
}

// Approximation-space files carry the lattice as a plain space file (meets
// and joins are derived from the order) and the inclusion as a map file:
// {"lattice": <space>, "xi": <map>}
inline ApproxSpace approx_space_from_json(const Json& j, const Config& cfg = {}) {
  check_schema(j, "approx space");
  if (!j.contains("lattice") || !j.contains("xi"))
    throw ParseError("approx space: needs 'lattice' and 'xi'");
  SpacePtr ls = space_from_json(j["lattice"]);
  PointMap xi = map_from_json(j["xi"]);
  if (!xi.codomain->same_structure(*ls))
    throw ParseError("approx space: xi must land in the lattice");
  try {
    return ApproxSpace(Lattice::from_space(ls, cfg),
                       PointMap(xi.domain, ls, xi.assignment));
  } catch (const NotALattice& e) {
    throw ParseError(std::string("approx space: ") + e.what());
  }
}

inline Json approx_space_to_json(const ApproxSpace& a) {
  Json j;
  j["lattice"] = space_to_json(a.L->space());
  j["xi"] = map_to_json(a.xi);
  return j;
}

// {"f": <map>, "values": {"x": [["a"],["a","b"]], ...}}
inline FamilyEnvelope family_envelope_from_json(const Json& j) {
  check_schema(j, "envelope");
  if (!j.contains("f") || !j.contains("values"))
    throw ParseError("envelope: needs 'f' and 'values'");
  PointMap f = map_from_json(j["f"]);
  std::vector<UpFamily> vals(f.domain->size(), UpFamily::empty(f.codomain));
  std::vector<bool> seen(f.domain->size(), false);
  for (const auto& [k, v] : j["values"].items()) {
    int i = f.domain->index_of(k);
    vals[i] = family_from_json(f.codomain, v);
    seen[i] = true;
  }
  for (int i = 0; i < f.domain->size(); ++i)
    if (!seen[i])
      throw ParseError("envelope: no value for element '" + f.domain->name(i) + "'");
  return FamilyEnvelope(f.domain, f.codomain, std::move(vals), f);
}

inline Json family_envelope_to_json(const FamilyEnvelope& env) {
  Json j;
  if (env.f) j["f"] = map_to_json(*env.f);
  Json vals = Json::object();
  for (int x = 0; x < env.X->size(); ++x)
    vals[env.X->name(x)] = family_to_json(env.at(x));
  j["values"] = std::move(vals);
  return j;
}

// ---- piecewise-affine functions ----------------------------------------

// {"breakpoints":[{"x":"0","value":"0"}],
//  "pieces":[{"slope":"-1","intercept":"0"},{"slope":"0","intercept":"1"}]}
inline PAFunction pa_from_json(const Json& j) {
  check_schema(j, "pa function");
  std::vector<PAFunction::Breakpoint> breaks;
  if (j.contains("breakpoints"))
    for (const auto& b : j["breakpoints"])
      breaks.push_back({Rational::parse(b.at("x").get<std::string>()),
                        Rational::parse(b.at("value").get<std::string>())});
  if (!j.contains("pieces")) throw ParseError("pa function: missing 'pieces'");
  std::vector<Affine> pieces;
  for (const auto& p : j["pieces"])
    pieces.push_back({Rational::parse(p.at("slope").get<std::string>()),
                      Rational::parse(p.at("intercept").get<std::string>())});
  try {
    return PAFunction(std::move(breaks), std::move(pieces));
  } catch (const Error& e) {
    throw ParseError(std::string("pa function: ") + e.what());
  }
}

inline Json pa_to_json(const PAFunction& f) {
  Json j;
  j["breakpoints"] = Json::array();
  for (const auto& b : f.breakpoints())
    j["breakpoints"].push_back({{"x", b.x.str()}, {"value", b.value.str()}});
  j["pieces"] = Json::array();
  for (const auto& p : f.pieces())
    j["pieces"].push_back({{"slope", p.slope.str()}, {"intercept", p.intercept.str()}});
  return j;
}

inline Json pa_envelope_to_json(const PAEnvelope& env) {
  Json j;
  j["breakpoints"] = Json::array();
  for (int i = 0; i < env.breakpoint_count(); ++i) {
    Json vals = Json::array();
    for (const auto& v : env.values()[i]) vals.push_back(v.str());
    j["breakpoints"].push_back({{"x", env.breakpoints()[i].str()}, {"values", vals}});
  }
  j["pieces"] = Json::array();
  for (const auto& branch_set : env.branches()) {
    Json branches = Json::array();
    for (const auto& a : branch_set)
      branches.push_back({{"slope", a.slope.str()}, {"intercept", a.intercept.str()}});
    j["pieces"].push_back(std::move(branches));
  }
  return j;
}

inline Json interval_to_json(const RealOpenSet& v) {
  Json j = Json::array();
  for (const auto& c : v.components())
    j.push_back({{"lo", c.lo ? Json(c.lo->str()) : Json(nullptr)},
                 {"hi", c.hi ? Json(c.hi->str()) : Json(nullptr)}});
  return j;
}

}  // namespace envlab

#endif  // ENVLAB_JSON_IO_HPP
