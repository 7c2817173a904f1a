#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "envlab/json_io.hpp"

using envlab::Json;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

std::string bin_path() {
  const char* p = std::getenv("ENVLAB_BIN");
  REQUIRE(p != nullptr);
  return p;
}
std::string data_path(const std::string& file) {
  const char* p = std::getenv("ENVLAB_DATA");
  REQUIRE(p != nullptr);
  return std::string(p) + "/" + file;
}

RunResult run(const std::string& args) {
  std::string cmd = bin_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

Json parse(const RunResult& r) { return Json::parse(r.out); }

}  // namespace

TEST_CASE("real composition reproduces the worked values") {
  // g after f collapses to the constant one
  auto gf = run("real-compose " + data_path("g.json") + " " + data_path("f.json"));
  CHECK(gf.exit_code == 0);
  Json j = parse(gf);
  CHECK(j["composite"]["breakpoints"].empty());
  CHECK(j["composite"]["pieces"] ==
        Json::parse(R"([[{"slope":"0","intercept":"1"}]])"));

  // f after g keeps the phantom value at zero
  auto fg = run("real-compose " + data_path("f.json") + " " + data_path("g.json"));
  CHECK(fg.exit_code == 0);
  Json j2 = parse(fg);
  REQUIRE(j2["composite"]["breakpoints"].size() == 1);
  CHECK(j2["composite"]["breakpoints"][0]["x"] == "0");
  CHECK(j2["composite"]["breakpoints"][0]["values"] == Json::array({"0", "1"}));
}

TEST_CASE("real universality verdicts and exit codes") {
  auto vf = run("real-universal " + data_path("f.json"));
  CHECK(vf.exit_code == 0);
  CHECK(parse(vf)["verdict"] == true);

  auto vg = run("real-universal " + data_path("g.json"));
  CHECK(vg.exit_code == 1);
  Json j = parse(vg);
  CHECK(j["verdict"] == false);
  REQUIRE(j["defects"].size() == 1);
  CHECK(j["defects"][0]["breakpoint"] == "0");
  CHECK(j["defects"][0]["orphan_value"] == "0");
  CHECK(j["defects"][0]["witness"] == "(0,+inf)");
}

TEST_CASE("real envelope and modulus") {
  auto ef = run("real-envelope " + data_path("f.json"));
  CHECK(ef.exit_code == 0);
  Json j = parse(ef);
  CHECK(j["envelope"]["breakpoints"][0]["values"] == Json::array({"0", "1"}));
  // the two envelopes agree pointwise
  auto eg = run("real-envelope " + data_path("g.json"));
  CHECK(parse(eg)["envelope"] == j["envelope"]);

  auto md = run("real-modulus " + data_path("identity.json") + " --x0 0 --eps 1/2");
  CHECK(md.exit_code == 0);
  CHECK(parse(md)["delta"] == "1/2");
  auto md2 = run("real-modulus " + data_path("f.json") + " --x0 0 --eps 1");
  CHECK(md2.exit_code == 1);
  CHECK(parse(md2)["delta"].is_null());
}

TEST_CASE("poset commands") {
  auto pe = run("poset-envelope " + data_path("step_map.json"));
  CHECK(pe.exit_code == 0);
  Json j = parse(pe);
  CHECK(j["universal"] == true);
  CHECK(j["envelope"]["top"] == Json::parse(R"([["1"]])"));
  CHECK(j["envelope"]["bot"] == Json::parse(R"([["0","1"]])"));

  auto pu = run("poset-universal " + data_path("step_map.json"));
  CHECK(pu.exit_code == 0);
  CHECK(parse(pu)["verdict"] == true);

  // a supplied envelope that witnesses nothing fails with a counterexample
  auto pue = run("poset-universal " + data_path("step_map.json") +
                 " --envelope " + data_path("empty_envelope.json"));
  CHECK(pue.exit_code == 1);
  Json je = parse(pue);
  CHECK(je["verdict"] == false);
  CHECK(je["counterexample"]["point"] == "top");
  CHECK(je["counterexample"]["open"] == Json::array({"1"}));

  auto pc = run("poset-compose " + data_path("swap_map.json") + " " +
                data_path("embed_map.json"));
  Json jc = parse(pc);
  CHECK((pc.exit_code == 0 || pc.exit_code == 1));
  CHECK(jc.contains("composite"));

  auto pb = run("poset-bundle " + data_path("step_map.json"));
  CHECK(pb.exit_code == 0);
  Json jb = parse(pb);
  CHECK(jb["Af_iso_OY"] == true);
  CHECK(jb["Lf_size"].get<int>() > 0);
  CHECK(jb["is_distributive"] == true);
}

TEST_CASE("verify corpus") {
  auto vc = run("verify-corpus --max-size 1");
  CHECK(vc.exit_code == 0);
  Json j = parse(vc);
  CHECK(j["verdict"] == true);
  for (const auto& s : j["suites"]) {
    CHECK(s["failures"] == 0);
    CHECK(s["instances"].get<long long>() >= 1);
  }

  auto one = run("verify-corpus --max-size 2 --suite noetherian --suite compacts");
  CHECK(one.exit_code == 0);
  CHECK(parse(one)["suites"].size() == 2);

  auto bad = run("verify-corpus --max-size 9");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("approximation-space files round-trip") {
  Json j = Json::parse(R"({
    "lattice": {"elements": ["e", "t", "b"], "le": [["b", "e"], ["e", "t"]]},
    "xi": {"domain": {"elements": ["p", "q"], "le": [["p", "q"]]},
           "codomain": {"elements": ["e", "t", "b"], "le": [["b", "e"], ["e", "t"]]},
           "map": {"p": "b", "q": "t"}}
  })");
  envlab::ApproxSpace a = envlab::approx_space_from_json(j);
  CHECK(a.L->size() == 3);
  CHECK(a.L->space()->name(a.L->bottom()) == "b");
  CHECK(a.L->space()->name(a.L->top()) == "t");
  Json back = envlab::approx_space_to_json(a);
  envlab::ApproxSpace again = envlab::approx_space_from_json(back);
  CHECK(envlab::approx_space_to_json(again) == back);

  // a non-lattice order is rejected as input
  Json bad = j;
  bad["lattice"] = Json::parse(R"({"elements": ["x", "y"], "le": []})");
  bad["xi"]["codomain"] = bad["lattice"];
  bad["xi"]["map"] = Json::parse(R"({"p": "x", "q": "y"})");
  CHECK_THROWS_AS(envlab::approx_space_from_json(bad), envlab::ParseError);
}

TEST_CASE("reports are deterministic and embed re-parseable inputs") {
  auto a = run("real-universal " + data_path("g.json"));
  auto b = run("real-universal " + data_path("g.json"));
  CHECK(a.out == b.out);

  Json j = parse(a);
  envlab::PAFunction g = envlab::pa_from_json(j["inputs"]["f"]);
  CHECK(envlab::pa_to_json(g) == j["inputs"]["f"]);

  auto c = run("poset-universal " + data_path("step_map.json"));
  Json jc = parse(c);
  envlab::PointMap f = envlab::map_from_json(jc["inputs"]["map"]);
  CHECK(envlab::map_to_json(f) == jc["inputs"]["map"]);
}

TEST_CASE("text format and error exits") {
  auto t = run("--format text real-universal " + data_path("f.json"));
  CHECK(t.exit_code == 0);
  CHECK(t.out.find("verdict: true") != std::string::npos);

  auto missing = run("real-universal /nonexistent.json");
  CHECK(missing.exit_code == 2);

  // a 17-point chain exceeds the default opens cap
  std::string space = "{\"elements\":[";
  std::string le = "\"le\":[";
  for (int i = 0; i < 17; ++i) {
    space += (i ? ",\"e" : "\"e") + std::to_string(i) + "\"";
    if (i) le += (i > 1 ? "," : "") + std::string("[\"e") +
                 std::to_string(i - 1) + "\",\"e" + std::to_string(i) + "\"]";
  }
  space += "]," + le + "]}";
  std::string path = "/tmp/envlab_big_map.json";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    fprintf(f, "{\"domain\":%s,\"codomain\":%s,\"map\":{", space.c_str(),
            space.c_str());
    for (int i = 0; i < 17; ++i)
      fprintf(f, "%s\"e%d\":\"e%d\"", i ? "," : "", i, i);
    fprintf(f, "}}");
    fclose(f);
  }
  auto capped = run("poset-envelope " + path);
  CHECK(capped.exit_code == 3);
}
