#pragma once

// Scenario execution and the run manifest. run_scenario materializes the
// configured model, executes each probe in isolation (a probe failure is
// recorded in the manifest and does not abort the run), writes JSON/CSV
// result payloads, and writes manifest.json last. Rerunning an identical
// config into a fresh directory reproduces byte-identical result payloads;
// manifests differ only in the wall_seconds field.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergo/scenario_config.hpp"

namespace ergo {

struct ProbeOutcome {
  std::string name;
  std::string kind;
  std::string status;   // "ok" | "error"
  std::string verdict;  // probe verdict ("" for plain estimators)
  double headline = 0.0;
  std::string error;                // populated when status == "error"
  std::vector<std::string> files;   // payload paths relative to the run dir
};

struct RunManifest {
  std::string config_hash;  // 16 hex digits, FNV-1a over the canonical doc
  std::string version;
  std::string scenario;
  std::uint64_t seed = 0;
  bool partial = false;       // any probe errored
  double wall_seconds = 0.0;  // excluded from reproducibility comparisons
  std::vector<ProbeOutcome> outcomes;
  // Stream audit: all randomness is counter-based on (seed, trajectory,
  // substream); the counts below say how many trajectory streams each probe
  // consumed and which extra tag the probe-level time sampler used.
  nlohmann::json rng_accounting = nlohmann::json::array();
};

std::uint64_t fnv1a64(const std::string& bytes);

// Hash of the canonical (parsed) document, so formatting and comments do not
// change identity.
std::string config_hash(const nlohmann::json& canonical);

RunManifest run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

nlohmann::json manifest_to_json(const RunManifest& m);

// probe | kind | status | verdict | headline rows plus registered targets.
std::string summary_table(const RunManifest& m);

}  // namespace ergo
