#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "roughflow/error.hpp"
#include "roughflow/parallel.hpp"
#include "roughflow/scenario.hpp"

using nlohmann::json;
namespace rf = roughflow;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> sets;
  bool json_out = false;
};

// key.path=value; value parsed as JSON, falling back to a bare string.
void apply_set(json& params, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) rf::fail(rf::ErrorCode::config_invalid, "--set expects key=value, got " + kv);
  json value;
  try {
    value = json::parse(kv.substr(eq + 1));
  } catch (const json::exception&) {
    value = kv.substr(eq + 1);
  }
  json* node = &params;
  std::stringstream path(kv.substr(0, eq));
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(path, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = &(*node)[keys[i]];
  (*node)[keys.back()] = value;
}

int execute(const std::string& scenario, const Common& c, json overrides,
            const std::function<void(const rf::RunManifest&)>& after = {}) {
  json cfg = json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) rf::fail(rf::ErrorCode::io_error, "cannot read config " + c.config);
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      rf::fail(rf::ErrorCode::config_invalid, std::string("config: ") + e.what());
    }
  }
  if (cfg.contains("scenario") && cfg["scenario"] != scenario)
    rf::fail(rf::ErrorCode::config_invalid, "scenario: config names '" + cfg["scenario"].get<std::string>() + "'");
  cfg["scenario"] = scenario;
  if (c.seed) cfg["seed"] = *c.seed;
  if (c.out_dir) cfg["output_dir"] = *c.out_dir;
  if (!cfg.contains("params")) cfg["params"] = json::object();
  cfg["params"].merge_patch(overrides);
  for (const auto& s : c.sets) apply_set(cfg["params"], s);

  const rf::RunConfig rc = rf::parse_config(cfg.dump());
  const rf::RunManifest m = rf::run_scenario(rc);
  if (after) after(m);
  if (c.json_out) {
    std::cout << m.to_json() << "\n";
  } else {
    std::cout << m.scenario << " -> " << m.run_dir << "\n";
    for (const auto& a : m.assertions)
      std::cout << "  " << (a.pass ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : "  (" + a.detail + ")")
                << "\n";
  }
  return m.all_passed() ? 0 : 1;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--output-dir", c.out_dir, "Root directory for run outputs");
  app->add_option("--set", c.sets, "Parameter override key.path=value (repeatable)");
  app->add_flag("--json", c.json_out, "Print the manifest as JSON");
}

}  // namespace

int main(int argc, char** argv) {
  rf::apply_thread_config();
  CLI::App app{"roughflow: stochastic flows and SPDEs with rough drift"};
  app.require_subcommand(1);

  std::function<int()> action;
  std::map<std::string, Common> common;

  for (const auto& name : rf::scenario_names()) {
    if (name == "gen-drift" || name == "build-zvonkin" || name == "verify-gronwall") continue;
    auto* sub = app.add_subcommand(name, "Run the " + name + " scenario");
    add_common(sub, common[name]);
    sub->callback([&, name] { action = [&, name] { return execute(name, common[name], json::object()); }; });
  }

  struct GenDrift {
    std::optional<double> alpha, q, theta, amplitude;
    std::optional<int> J, d, N, M;
    std::string out;
  } gd;
  {
    auto* sub = app.add_subcommand("gen-drift", "Generate a Weierstrass-type drift field");
    add_common(sub, common["gen-drift"]);
    sub->add_option("--alpha", gd.alpha, "Holder exponent");
    sub->add_option("--q", gd.q, "Time integrability exponent");
    sub->add_option("--theta", gd.theta, "Time singularity exponent");
    sub->add_option("--J", gd.J, "Number of dyadic levels");
    sub->add_option("--amplitude", gd.amplitude, "Overall amplitude");
    sub->add_option("--d", gd.d, "Spatial dimension");
    sub->add_option("--N", gd.N, "Points per axis");
    sub->add_option("--M", gd.M, "Time steps");
    sub->add_option("--out", gd.out, "Copy the generated field to this .gfd path");
    sub->callback([&] {
      action = [&] {
        json d = json::object();
        if (gd.alpha) d["alpha"] = *gd.alpha;
        if (gd.q) d["q"] = *gd.q;
        if (gd.theta) d["theta"] = *gd.theta;
        if (gd.J) d["J"] = *gd.J;
        if (gd.amplitude) d["amplitude"] = *gd.amplitude;
        if (gd.d) d["d"] = *gd.d;
        if (gd.N) d["N"] = *gd.N;
        if (gd.M) d["M"] = *gd.M;
        return execute("gen-drift", common["gen-drift"], json{{"drift", d}}, [&](const rf::RunManifest& m) {
          if (!gd.out.empty())
            std::filesystem::copy_file(std::filesystem::path(m.run_dir) / "drift.gfd", gd.out,
                                       std::filesystem::copy_options::overwrite_existing);
        });
      };
    });
  }

  struct BuildZvonkin {
    std::string drift, direction;
    std::optional<double> eta;
  } bz;
  {
    auto* sub = app.add_subcommand("build-zvonkin", "Tune lambda and build a Zvonkin map");
    add_common(sub, common["build-zvonkin"]);
    sub->add_option("--drift", bz.drift, "Drift .gfd file")->check(CLI::ExistingFile);
    sub->add_option("--direction", bz.direction, "fwd or bwd")->check(CLI::IsMember({"fwd", "bwd"}));
    sub->add_option("--eta", bz.eta, "Target gradient margin (default 1/(2d))");
    sub->callback([&] {
      action = [&] {
        json o = json::object();
        if (!bz.drift.empty()) o["drift"] = {{"kind", "file"}, {"file", bz.drift}};
        if (!bz.direction.empty()) o["direction"] = bz.direction;
        if (bz.eta) o["eta"] = *bz.eta;
        return execute("build-zvonkin", common["build-zvonkin"], o);
      };
    });
  }

  bool counterexample = false;
  {
    auto* sub = app.add_subcommand("verify-gronwall", "Check the Volterra-Gronwall bound");
    add_common(sub, common["verify-gronwall"]);
    sub->add_flag("--counterexample", counterexample, "Check the counterexample instead of a kernel");
    sub->callback([&] {
      action = [&] {
        json o = json::object();
        if (counterexample) o["counterexample"] = true;
        return execute("verify-gronwall", common["verify-gronwall"], o);
      };
    });
  }

  app.add_subcommand("config-reference", "Print every scenario's parameters with defaults")->callback([&] {
    action = [] {
      std::cout << rf::config_reference() << "\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action();
  } catch (const rf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
