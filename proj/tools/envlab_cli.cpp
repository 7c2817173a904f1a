// Command-line front end: parses input files, dispatches the calculus
// operations, and emits deterministic JSON or text reports.
//
// Exit codes: 0 verdict-true / successful computation, 1 verdict-false,
// 2 input error, 3 cap exceeded.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "envlab/bundle.hpp"
#include "envlab/corpus.hpp"
#include "envlab/envelope.hpp"
#include "envlab/json_io.hpp"
#include "envlab/realpw.hpp"

namespace {

using envlab::Json;

constexpr const char* kVersion = "1.0.0";

struct Options {
  std::string out;
  std::string format = "json";
  int cap_opens = 16;
  int cap_mu = 3;
  bool timings = false;
};

envlab::Config config_of(const Options& o) {
  envlab::Config cfg;
  cfg.cap_opens = o.cap_opens;
  cfg.cap_mu = o.cap_mu;
  return cfg;
}

Json report_header(const std::string& command, const Options& o) {
  Json j;
  j["schema"] = envlab::kSchema;
  j["tool"] = "envlab";
  j["version"] = kVersion;
  j["command"] = command;
  j["caps"] = {{"opens", o.cap_opens}, {"mu", o.cap_mu}};
  return j;
}

// The text rendering is derived from the JSON report, never computed
// separately.
void render_text(const Json& j, std::ostream& os, int indent = 0) {
  std::string pad(indent, ' ');
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || (v.is_array() && !v.empty() && v[0].is_object())) {
        os << pad << k << ":\n";
        render_text(v, os, indent + 2);
      } else {
        os << pad << k << ": " << v.dump() << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_object()) {
        os << pad << "-\n";
        render_text(v, os, indent + 2);
      } else {
        os << pad << "- " << v.dump() << "\n";
      }
    }
  } else {
    os << pad << j.dump() << "\n";
  }
}

int emit(const Json& report, const Options& o, int code) {
  std::ostringstream body;
  if (o.format == "text")
    render_text(report, body);
  else
    body << report.dump(2) << "\n";
  if (o.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream f(o.out);
    if (!f) throw envlab::ParseError("cannot write '" + o.out + "'");
    f << body.str();
  }
  return code;
}

Json defect_to_json(const envlab::UniversalityDefect& d) {
  return Json{{"breakpoint", d.breakpoint.str()},
              {"orphan_value", d.orphan_value.str()},
              {"witness", d.witness.render()}};
}

int cmd_poset_envelope(const std::string& map_path, const Options& o) {
  auto cfg = config_of(o);
  envlab::PointMap f = envlab::map_from_json(envlab::load_json_file(map_path));
  auto env = envlab::principal_family_envelope(f);
  Json rep = report_header("poset-envelope", o);
  rep["inputs"] = {{"map", envlab::map_to_json(f)}};
  rep["envelope"] = envlab::family_envelope_to_json(env)["values"];
  rep["universal"] = envlab::is_uniformly_universal(f, env, cfg).verdict;
  return emit(rep, o, 0);
}

int cmd_poset_universal(const std::string& map_path,
                        const std::string& env_path, const Options& o) {
  auto cfg = config_of(o);
  envlab::PointMap f = envlab::map_from_json(envlab::load_json_file(map_path));
  envlab::FamilyEnvelope env =
      env_path.empty()
          ? envlab::principal_family_envelope(f)
          : envlab::family_envelope_from_json(envlab::load_json_file(env_path));
  if (!envlab::same_space(env.X, f.domain) ||
      !envlab::same_space(env.Y, f.codomain))
    throw envlab::ParseError("envelope does not match the map's spaces");
  auto verdict = envlab::is_uniformly_universal(f, env, cfg);
  Json rep = report_header("poset-universal", o);
  rep["inputs"] = {{"map", envlab::map_to_json(f)}};
  if (!env_path.empty())
    rep["inputs"]["envelope"] = envlab::family_envelope_to_json(env);
  rep["verdict"] = verdict.verdict;
  if (verdict.counterexample) {
    auto [x, v] = *verdict.counterexample;
    rep["counterexample"] = {{"point", f.domain->name(x)},
                             {"open", envlab::open_to_json(f.codomain, v)}};
  } else {
    rep["counterexample"] = nullptr;
  }
  return emit(rep, o, verdict.verdict ? 0 : 1);
}

int cmd_poset_compose(const std::string& gmap_path, const std::string& fmap_path,
                      const Options& o) {
  auto cfg = config_of(o);
  envlab::PointMap g = envlab::map_from_json(envlab::load_json_file(gmap_path));
  envlab::PointMap f = envlab::map_from_json(envlab::load_json_file(fmap_path));
  if (!envlab::same_space(f.codomain, g.domain))
    throw envlab::ParseError("codomain of f must equal the domain of g");
  auto composite = envlab::compose_families(envlab::principal_family_envelope(g),
                                            envlab::principal_family_envelope(f),
                                            cfg);
  auto verdict = envlab::is_uniformly_universal(g.after(f), composite, cfg);
  Json rep = report_header("poset-compose", o);
  rep["inputs"] = {{"g", envlab::map_to_json(g)}, {"f", envlab::map_to_json(f)}};
  rep["composite"] = envlab::family_envelope_to_json(composite)["values"];
  rep["universal"] = verdict.verdict;
  if (verdict.counterexample) {
    auto [x, v] = *verdict.counterexample;
    rep["counterexample"] = {{"point", f.domain->name(x)},
                             {"open", envlab::open_to_json(g.codomain, v)}};
  } else {
    rep["counterexample"] = nullptr;
  }
  return emit(rep, o, verdict.verdict ? 0 : 1);
}

int cmd_poset_bundle(const std::string& map_path, const Options& o) {
  auto cfg = config_of(o);
  envlab::PointMap f = envlab::map_from_json(envlab::load_json_file(map_path));
  auto ab = envlab::advice_bundle(f, cfg);
  Json rep = report_header("poset-bundle", o);
  rep["inputs"] = {{"map", envlab::map_to_json(f)}};
  rep["Lf_size"] = ab.lf.lattice->size();
  rep["Af_size"] = ab.bundle.A->size();
  rep["Af_iso_OY"] = ab.iso_to_opens;
  rep["is_distributive"] = envlab::is_distributive(*ab.bundle.A);
  Json sigma = Json::object();
  for (int v = 0; v < ab.lf.opens_y.count(); ++v) {
    int a = ab.bundle.sigma[v];
    sigma[f.codomain->render_subset(ab.lf.opens_y.open_at(v))] =
        ab.bundle.A->space()->name(a);
  }
  rep["sigma"] = std::move(sigma);
  Json pf = Json::object();
  for (int a = 0; a < ab.lf.lattice->size(); ++a)
    pf[ab.lf.lattice->space()->name(a)] = ab.lf.lattice->space()->name(ab.P(a));
  rep["Pf"] = std::move(pf);
  auto co = envlab::principal_coenvelope(f, ab.bundle);
  Json costar = Json::object();
  for (int a = 0; a < ab.bundle.A->size(); ++a)
    costar[ab.bundle.A->space()->name(a)] =
        envlab::open_to_json(f.domain, co.fstar[a]);
  rep["coenvelope"] = std::move(costar);
  return emit(rep, o, 0);
}

int cmd_real_envelope(const std::string& path, const Options& o) {
  envlab::PAFunction f = envlab::pa_from_json(envlab::load_json_file(path));
  auto env = envlab::cluster_envelope(f);
  Json rep = report_header("real-envelope", o);
  rep["inputs"] = {{"f", envlab::pa_to_json(f)}};
  rep["envelope"] = envlab::pa_envelope_to_json(env);
  return emit(rep, o, 0);
}

int cmd_real_compose(const std::string& g_path, const std::string& f_path,
                     const Options& o) {
  auto cfg = config_of(o);
  envlab::PAFunction g = envlab::pa_from_json(envlab::load_json_file(g_path));
  envlab::PAFunction f = envlab::pa_from_json(envlab::load_json_file(f_path));
  auto env = envlab::kleisli_compose(envlab::cluster_envelope(g),
                                     envlab::cluster_envelope(f), cfg);
  Json rep = report_header("real-compose", o);
  rep["inputs"] = {{"g", envlab::pa_to_json(g)}, {"f", envlab::pa_to_json(f)}};
  rep["composite"] = envlab::pa_envelope_to_json(env);
  return emit(rep, o, 0);
}

int cmd_real_universal(const std::string& path, const Options& o) {
  envlab::PAFunction f = envlab::pa_from_json(envlab::load_json_file(path));
  auto defects = envlab::universality_defects(f);
  Json rep = report_header("real-universal", o);
  rep["inputs"] = {{"f", envlab::pa_to_json(f)}};
  rep["verdict"] = defects.empty();
  rep["defects"] = Json::array();
  for (const auto& d : defects) rep["defects"].push_back(defect_to_json(d));
  return emit(rep, o, defects.empty() ? 0 : 1);
}

int cmd_real_modulus(const std::string& path, const std::string& x0,
                     const std::string& eps, const Options& o) {
  envlab::PAFunction f = envlab::pa_from_json(envlab::load_json_file(path));
  auto delta = envlab::local_modulus(f, envlab::Rational::parse(x0),
                                     envlab::Rational::parse(eps));
  Json rep = report_header("real-modulus", o);
  rep["inputs"] = {{"f", envlab::pa_to_json(f)}, {"x0", x0}, {"eps", eps}};
  rep["delta"] = delta ? Json(delta->str()) : Json(nullptr);
  return emit(rep, o, delta ? 0 : 1);
}

int cmd_verify_corpus(int max_size, std::vector<std::string> suites,
                      const Options& o) {
  if (max_size < 1 || max_size > 4)
    throw envlab::ParseError("--max-size must be between 1 and 4");
  auto cfg = config_of(o);
  if (suites.empty()) suites = envlab::corpus::suite_names();
  Json rep = report_header("verify-corpus", o);
  rep["max_size"] = max_size;
  rep["suites"] = Json::array();
  long long failures = 0;
  for (const auto& name : suites) {
    auto r = envlab::corpus::run_suite(name, max_size, cfg);
    Json s;
    s["name"] = r.name;
    s["instances"] = r.instances;
    s["failures"] = r.failures;
    if (!r.first_failure.empty()) s["first_failure"] = r.first_failure;
    if (!r.note.empty()) s["note"] = r.note;
    if (o.timings) s["seconds"] = r.seconds;
    rep["suites"].push_back(std::move(s));
    failures += r.failures;
  }
  rep["verdict"] = failures == 0;
  return emit(rep, o, failures == 0 ? 0 : 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"envlab: exact envelope calculus on finite spaces and "
               "piecewise-affine reals"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--out", opt.out, "write the report to a file");
  app.add_option("--format", opt.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  app.add_option("--cap-opens", opt.cap_opens, "opens enumeration cap");
  app.add_option("--cap-mu", opt.cap_mu, "monad multiplication cap");
  app.add_flag("--timings", opt.timings,
               "include timings in verify-corpus reports (non-deterministic)");

  std::string map_path, env_path, gmap_path, fmap_path, x0, eps;
  int max_size = 3;
  std::vector<std::string> suites;

  auto* pe = app.add_subcommand("poset-envelope",
                                "principal double-powerspace envelope of a map");
  pe->add_option("map", map_path, "map file")->required();

  auto* pu =
      app.add_subcommand("poset-universal", "uniform universality of an envelope");
  pu->add_option("map", map_path, "map file")->required();
  pu->add_option("--envelope", env_path, "envelope file (default: principal)");

  auto* pc = app.add_subcommand("poset-compose",
                                "compose principal envelopes of g after f");
  pc->add_option("gmap", gmap_path, "outer map file")->required();
  pc->add_option("fmap", fmap_path, "inner map file")->required();

  auto* pb = app.add_subcommand("poset-bundle", "least advice bundle of a map");
  pb->add_option("map", map_path, "map file")->required();

  auto* re = app.add_subcommand("real-envelope",
                                "cluster envelope of a piecewise-affine map");
  re->add_option("f", fmap_path, "function file")->required();

  auto* rc = app.add_subcommand("real-compose",
                                "compose cluster envelopes of g after f");
  rc->add_option("g", gmap_path, "outer function file")->required();
  rc->add_option("f", fmap_path, "inner function file")->required();

  auto* ru = app.add_subcommand("real-universal",
                                "universality defects of the cluster envelope");
  ru->add_option("f", fmap_path, "function file")->required();

  auto* rm = app.add_subcommand("real-modulus", "local modulus of continuity");
  rm->add_option("f", fmap_path, "function file")->required();
  rm->add_option("--x0", x0, "base point")->required();
  rm->add_option("--eps", eps, "target tolerance")->required();

  auto* vc = app.add_subcommand("verify-corpus",
                                "run the theorem suites over the poset corpus");
  vc->add_option("--max-size", max_size, "largest poset size (1..4)");
  vc->add_option("--suite", suites, "suite name (repeatable; default: all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pe->parsed()) return cmd_poset_envelope(map_path, opt);
    if (pu->parsed()) return cmd_poset_universal(map_path, env_path, opt);
    if (pc->parsed()) return cmd_poset_compose(gmap_path, fmap_path, opt);
    if (pb->parsed()) return cmd_poset_bundle(map_path, opt);
    if (re->parsed()) return cmd_real_envelope(fmap_path, opt);
    if (rc->parsed()) return cmd_real_compose(gmap_path, fmap_path, opt);
    if (ru->parsed()) return cmd_real_universal(fmap_path, opt);
    if (rm->parsed()) return cmd_real_modulus(fmap_path, x0, eps, opt);
    if (vc->parsed()) return cmd_verify_corpus(max_size, suites, opt);
  } catch (const envlab::CapExceeded& e) {
    std::cerr << "error: " << e.what() << " (raise --cap-"
              << (e.cap_name == "mu" ? "mu" : "opens") << " to at least "
              << e.requested << ")\n";
    return 3;
  } catch (const envlab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const envlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
