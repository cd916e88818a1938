#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "kf/errors.hpp"
#include "kf/verify.hpp"

namespace V = kf::verify;
namespace C = kf::catalog;
namespace fs = std::filesystem;
using V::json;

namespace {

// Subset of JSON Schema: type, enum, required, properties, items, minimum, $ref into $defs.
void validate(const nlohmann::json& value, const nlohmann::json& schema, const nlohmann::json& root,
              const std::string& path, std::vector<std::string>& errors) {
  if (schema.contains("$ref")) {
    const auto ref = schema["$ref"].get<std::string>();
    const auto name = ref.substr(ref.rfind('/') + 1);
    validate(value, root["$defs"][name], root, path, errors);
    return;
  }
  if (schema.contains("enum")) {
    bool hit = false;
    for (const auto& e : schema["enum"]) hit = hit || e == value;
    if (!hit) errors.push_back(path + ": not in enum");
  }
  if (schema.contains("type")) {
    const auto t = schema["type"].get<std::string>();
    const bool ok = (t == "object" && value.is_object()) || (t == "array" && value.is_array()) ||
                    (t == "string" && value.is_string()) || (t == "boolean" && value.is_boolean()) ||
                    (t == "integer" && value.is_number_integer()) || (t == "number" && value.is_number());
    if (!ok) {
      errors.push_back(path + ": expected " + t);
      return;
    }
  }
  if (schema.contains("minimum") && value.is_number() && value.get<double>() < schema["minimum"].get<double>())
    errors.push_back(path + ": below minimum");
  if (schema.contains("required"))
    for (const auto& key : schema["required"])
      if (!value.contains(key.get<std::string>())) errors.push_back(path + ": missing " + key.get<std::string>());
  if (schema.contains("properties") && value.is_object())
    for (const auto& [key, sub] : schema["properties"].items())
      if (value.contains(key)) validate(value[key], sub, root, path + "." + key, errors);
  if (schema.contains("items") && value.is_array())
    for (std::size_t i = 0; i < value.size(); ++i)
      validate(value[i], schema["items"], root, path + "[" + std::to_string(i) + "]", errors);
}

void check_schema(const json& report, const std::string& file) {
  std::ifstream in(fs::path(KF_SOURCE_DIR) / "schemas" / file);
  REQUIRE(in);
  const auto schema = nlohmann::json::parse(in);
  std::vector<std::string> errors;
  validate(nlohmann::json::parse(report.dump()), schema, schema, "$", errors);
  for (const auto& e : errors) FAIL_CHECK(e);
}

V::Config quick(int samples = 8) {
  V::Config c;
  c.samples = samples;
  c.threads = 1;
  return c;
}

V::ManifoldSpec spec_of(const std::string& text) { return V::parse_spec(nlohmann::json::parse(text)); }

const char* const square_torus = R"({
  "name": "square-torus", "dim": 2, "potential": "z1*zbar1 + z2*zbar2",
  "lattice": {"generators": [[1, 0], [0, 1], [[0, 1], 0], [0, [0, 1]]]},
  "expected_class": "torus"})";

const char* const reflected = R"({
  "name": "reflected", "dim": 1, "potential": "z1*zbar1",
  "lattice": {"generators": [[1], [[0, 1]]]},
  "group": {"elements": [{"A": [[1]], "t": [0]}, {"A": [[-1]], "t": [0]}]}})";

struct Run {
  int code;
  std::string out;
};

Run run_cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "kf_cli_out.txt";
  const std::string cmd = std::string(KF_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("spec files round trip") {
  for (const auto& e : C::full_catalog()) {
    if (e.metadata_only || !e.potential) continue;
    CAPTURE(e.name);
    const auto first = V::spec_to_json(V::spec_from_catalog(e));
    const auto again = V::spec_to_json(V::parse_spec(nlohmann::json::parse(first.dump())));
    CHECK(first.dump() == again.dump());
  }
  const auto s = spec_of(square_torus);
  CHECK(s.domain.re.size() == 2);
  CHECK(s.domain.re[0] == std::pair{-1.0, 1.0});
}

TEST_CASE("spec file errors") {
  CHECK_THROWS_AS(spec_of(R"({"dim": 1, "potential": "z1*zbar1"})"), kf::InputError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 0, "potential": "z1*zbar1"})"), kf::InputError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z1*zbar1 +"})"), kf::ParseError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z2*zbar2"})"), kf::ParseError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z1*zbar1",
                             "group": {"elements": [{"A": [[1]], "t": [0]}]}})"),
                  kf::InputError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z1*zbar1",
                             "sample_domain": {"re": [[1, 1]], "im": [[0, 1]]}})"),
                  kf::InputError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z1*zbar1",
                             "lattice": {"generators": [[1], [2]]}})"),
                  kf::InputError);
  CHECK_THROWS_AS(spec_of(R"({"name": "x", "dim": 1, "potential": "z1*zbar1", "expected_class": "sphere"})"),
                  kf::InputError);

  V::Tolerances t;
  t.set("fd", 1e-3);
  CHECK(t.fd == 1e-3);
  CHECK_THROWS_AS(t.set("speed", 1.0), kf::InputError);
  CHECK_THROWS_AS(t.set("fd", -1.0), kf::InputError);
}

TEST_CASE("verify reports") {
  const auto config = quick();
  const auto torus = V::run_verify(spec_of(square_torus), config);
  CHECK(torus.verdict == V::Verdict::frobenius);
  CHECK(torus.reasons.empty());
  CHECK(torus.samples.size() == 8);
  for (const auto& s : torus.samples) {
    CHECK(s.max_curvature < 1e-9);
    CHECK(s.wdvv < 1e-9);
  }
  check_schema(V::report_to_json(torus, config), "report.schema.json");

  V::ManifoldSpec fs_spec = V::spec_from_catalog(C::full_catalog()[10]);
  REQUIRE(fs_spec.name == "fubini-study-2");
  const auto fs = V::run_verify(fs_spec, config);
  CHECK(fs.verdict == V::Verdict::not_frobenius);
  double wdvv = 0.0;
  for (const auto& s : fs.samples) wdvv = std::max(wdvv, s.wdvv);
  CHECK(wdvv > 1e-2);
  CHECK(V::expected_verdict(fs_spec) == V::Verdict::not_frobenius);
  check_schema(V::report_to_json(fs, config), "report.schema.json");

  const auto refl = V::run_verify(spec_of(reflected), config);
  CHECK_FALSE(refl.group.free);
  CHECK(refl.verdict == V::Verdict::not_frobenius);
  CHECK(std::find(refl.reasons.begin(), refl.reasons.end(), "action not free") != refl.reasons.end());
  check_schema(V::report_to_json(refl, config), "report.schema.json");
}

TEST_CASE("degenerate samples give an error verdict") {
  const auto spec = spec_of(R"({"name": "flat-direction", "dim": 2, "potential": "z1*zbar1"})");
  const auto r = V::run_verify(spec, quick(4));
  CHECK(r.verdict == V::Verdict::error);
  for (const auto& s : r.samples) CHECK(s.error.has_value());
}

TEST_CASE("sampling is seeded and inside the box") {
  V::Box box{{{-0.5, 0.25}, {0.0, 2.0}}, {{1.0, 1.5}, {-3.0, -2.0}}};
  const auto a = V::sample_points(box, 50, 9), b = V::sample_points(box, 50, 9), c = V::sample_points(box, 50, 10);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a)
    for (int k = 0; k < 2; ++k) {
      CHECK(p[k].real() >= box.re[k].first);
      CHECK(p[k].real() <= box.re[k].second);
      CHECK(p[k].imag() >= box.im[k].first);
      CHECK(p[k].imag() <= box.im[k].second);
    }
}

TEST_CASE("catalog runs") {
  const auto config = quick(4);
  const auto surfaces = V::run_catalog("surfaces", config);
  CHECK(surfaces.entries == 8);
  CHECK(surfaces.all_expected);
  for (const auto& e : surfaces.report["entries"]) CHECK(e["report"]["verdict"] == "frobenius");
  check_schema(surfaces.report, "catalog.schema.json");

  const auto hopf = V::run_catalog("hopf", config);
  REQUIRE(hopf.report["entries"].size() == 1);
  const auto& flags = hopf.report["entries"][0]["flags"];
  CHECK(flags["affine"] == true);
  CHECK(flags["kahler"] == false);
  CHECK(flags["frobenius"] == false);
  CHECK(hopf.report["entries"][0]["hopf"]["valid"] == true);

  CHECK(V::filter_catalog("torus").size() == 1);
  CHECK(V::filter_catalog("all").size() == C::full_catalog().size());
  CHECK(V::filter_catalog("no-such-entry").empty());
}

TEST_CASE("theta runs") {
  V::ThetaParams p;
  p.level = 3;
  const auto run = V::run_theta(p, quick());
  CHECK(run.pass);
  CHECK(run.report["level_space"]["dimension"] == 3);
  for (const auto& q : run.report["quasi_periodicity"]) CHECK(q["max_residual"].get<double>() < 1e-8);
  check_schema(run.report, "theta.schema.json");

  p.tau(0, 0) = 1.0;
  try {
    V::run_theta(p, quick());
    FAIL("expected an input error");
  } catch (const kf::InputError& e) {
    CHECK(std::string(e.what()).find("tau not in Siegel upper half space") != std::string::npos);
  }
}

TEST_CASE("reports are deterministic") {
  const auto config = quick(6);
  const auto spec = V::spec_from_catalog(C::full_catalog()[10]);
  CHECK(V::report_to_json(V::run_verify(spec, config), config).dump() ==
        V::report_to_json(V::run_verify(spec, config), config).dump());
  auto threaded = config;
  threaded.threads = 3;
  CHECK(V::report_to_json(V::run_verify(spec, config), config).dump() ==
        V::report_to_json(V::run_verify(spec, threaded), config).dump());
}

TEST_CASE("command line exit codes") {
  const auto torus = write_temp("kf_torus.json", square_torus);
  CHECK(run_cli("verify " + torus.string() + " --samples 4").code == 0);

  // Flat potential declared as a negative control: verdict mismatch.
  auto mismatched = nlohmann::json::parse(square_torus);
  mismatched["expected_class"] = "negative-control";
  CHECK(run_cli("verify " + write_temp("kf_mismatch.json", mismatched.dump()).string() + " --samples 4").code == 1);

  const auto broken = write_temp("kf_broken.json", R"({"name": "b", "dim": 1, "potential": "z1*(zbar1"})");
  const auto parse = run_cli("verify " + broken.string());
  CHECK(parse.code == 2);
  CHECK(parse.out.find("parse error at [") != std::string::npos);
  CHECK(run_cli("verify /nonexistent/spec.json").code == 2);
  CHECK(run_cli("verify " + torus.string() + " --tolerance speed=1").code == 2);
  CHECK(run_cli("theta --tau '[[[1, 0]]]'").code == 2);
  CHECK(run_cli("frobnicate").code == 2);

  const auto flat_dir = write_temp("kf_degenerate.json", R"({"name": "d", "dim": 2, "potential": "z1*zbar1"})");
  CHECK(run_cli("verify " + flat_dir.string() + " --samples 4").code == 3);

  const auto text = run_cli("verify " + torus.string() + " --samples 4 --text");
  CHECK(text.code == 0);
  CHECK(text.out.find("frobenius") != std::string::npos);

  const auto exported = run_cli("catalog --export hyperelliptic-Z4");
  CHECK(exported.code == 0);
  CHECK(V::parse_spec(nlohmann::json::parse(exported.out)).name == "hyperelliptic-Z4");
  CHECK(run_cli("catalog --export nothing").code == 2);

  // Flag wins over the environment.
  const auto env_seed = run_cli("verify " + torus.string() + " --samples 2");
  ::setenv("FROBENIUS_VERIFY_SEED", "17", 1);
  const auto from_env = run_cli("verify " + torus.string() + " --samples 2");
  const auto from_flag = run_cli("verify " + torus.string() + " --samples 2 --seed 20240917");
  ::unsetenv("FROBENIUS_VERIFY_SEED");
  CHECK(nlohmann::json::parse(from_env.out)["seed"] == 17);
  CHECK(from_flag.out == env_seed.out);
}
