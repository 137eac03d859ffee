#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "roughflow/error.hpp"
#include "roughflow/scenario.hpp"

using namespace roughflow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("roughflow_cli_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig config(const std::string& scenario, const json& params, const fs::path& out, std::uint64_t seed = 3) {
  return parse_config(json{{"scenario", scenario}, {"seed", seed}, {"output_dir", out.string()}, {"params", params}}.dump());
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::invalid_argument;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing fills defaults and hashes canonically") {
  const auto a = parse_config(R"({"scenario":"verify-gronwall"})");
  CHECK(a.seed == 1);
  CHECK(a.output_dir == "runs");
  const auto b = parse_config(R"({"scenario":"verify-gronwall","params":{"kernel":"constant","M":1000}})");
  CHECK(config_hash(a) == config_hash(b));
  const auto c = parse_config(R"({"scenario":"verify-gronwall","params":{"M":999}})");
  CHECK(config_hash(a) != config_hash(c));
  const auto d = parse_config(R"({"scenario":"verify-gronwall","seed":2})");
  CHECK(config_hash(a) != config_hash(d));
  CHECK(config_hash(a).size() == 16);
  CHECK(scenario_names().size() == 10);
  const auto ref = json::parse(config_reference());
  for (const auto& n : scenario_names()) CHECK(ref.contains(n));
}

TEST_CASE("invalid configs name the offending field") {
  CHECK(code_of([] { parse_config("{"); }) == ErrorCode::config_invalid);
  CHECK(message_of([] { parse_config(R"({"scenario":"nope"})"); }).find("scenario") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"seed":1})"); }).find("scenario") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"scenario":"solve-pde","extra":1})"); }).find("extra") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"scenario":"solve-pde","params":{"drift":{"N":"x"}}})"); })
            .find("params.drift.N") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"scenario":"solve-pde","params":{"drift":{"Q":1}}})"); })
            .find("params.drift.Q") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"scenario":"verify-gronwall","params":{"M":1.5}})"); })
            .find("params.M") != std::string::npos);
  CHECK(message_of([] { parse_config(R"({"scenario":"verify-gronwall","seed":-1})"); }).find("seed") !=
        std::string::npos);
}

TEST_CASE("stage errors carry the stage tag") {
  const auto out = scratch("stage");
  const auto c = config("solve-pde", {{"max_iter", 1}, {"tol", 1e-14}}, out);
  const auto msg = message_of([&] { run_scenario(c); });
  CHECK(msg.find("[solve]") != std::string::npos);
  CHECK(message_of([&] { run_scenario(config("solve-pde", {{"source", "cos"}}, out)); }).find("params.source") !=
        std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("counterexample scenario passes and writes a manifest") {
  const auto out = scratch("gronwall");
  const auto m = run_scenario(config("verify-gronwall", {{"counterexample", true}}, out));
  CHECK(m.all_passed());
  REQUIRE(m.assertions.size() == 2);
  CHECK(m.assertions[0].name == "e^(1-e^-t) < 1 + t");
  const fs::path dir = m.run_dir;
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK_FALSE(fs::exists(dir / "manifest.json.tmp"));
  const auto j = json::parse(slurp(dir / "manifest.json"));
  CHECK(j["config_hash"] == m.config_hash);
  CHECK(j["all_passed"] == true);
  CHECK(j["files"].size() == 1);
  CHECK(j["timings"].size() == 1);
  CHECK(slurp(dir / "counterexample.csv").rfind("# config " + m.config_hash, 0) == 0);
  fs::remove_all(out);
}

TEST_CASE("failing assertions are reported, not hidden") {
  const auto out = scratch("fail");
  const auto m = run_scenario(config("verify-duality", {{"min_order", 5.0}}, out));
  CHECK_FALSE(m.all_passed());
  CHECK(json::parse(m.to_json())["all_passed"] == false);
  fs::remove_all(out);
}

TEST_CASE("full pipeline on zero drift passes trivially") {
  const auto out = scratch("zero");
  const auto m = run_scenario(config("full-pipeline", {{"drift", {{"kind", "zero"}}}, {"stability_paths", 20}}, out));
  CHECK(m.all_passed());
  CHECK(m.assertions.size() >= 6);
  fs::remove_all(out);
}

TEST_CASE("re-running a config reproduces every CSV bit for bit") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const std::string s : {"simulate-flow", "run-transport", "run-continuity", "full-pipeline", "gen-drift"}) {
    const json params = s == "full-pipeline" ? json{{"stability_paths", 20}, {"paths", 10}} : json::object();
    const auto ma = run_scenario(config(s, params, a, 11));
    const auto mb = run_scenario(config(s, params, b, 11));
    CHECK(ma.files == mb.files);
    for (const auto& f : ma.files) {
      INFO(s << "/" << f);
      CHECK(slurp(fs::path(ma.run_dir) / f) == slurp(fs::path(mb.run_dir) / f));
    }
    CHECK(json::parse(ma.results) == json::parse(mb.results));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
