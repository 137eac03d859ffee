#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace roughflow {

/// Scenario name, seed, output root and the scenario parameters as JSON text.
struct RunConfig {
  std::string scenario;
  std::uint64_t seed = 1;
  std::string output_dir = "runs";
  std::string params = "{}";
};

/// Parses {"scenario": ..., "seed": ..., "output_dir": ..., "params": {...}}.
/// Throws ConfigInvalid naming the offending field path.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Canonical JSON of the config (sorted keys, parameters merged over defaults).
std::string canonical_config(const RunConfig& config);
/// FNV-1a 64 of the canonical config, hex.
std::string config_hash(const RunConfig& config);

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  std::string scenario;
  std::string config_hash;
  std::string run_dir;
  std::vector<StageTiming> timings;
  std::vector<std::string> files;
  std::vector<Assertion> assertions;
  std::string results = "{}";  // scenario summary as JSON text

  bool all_passed() const noexcept;
  std::string to_json() const;
};

std::vector<std::string> scenario_names();

/// Runs the scenario into <output_dir>/<scenario>-<hash>/ and writes
/// manifest.json there (atomically, via rename). Stage errors are rethrown
/// with the stage name prefixed.
RunManifest run_scenario(const RunConfig& config);

/// Every scenario's parameters with their defaults, as JSON text.
std::string config_reference();

}  // namespace roughflow
