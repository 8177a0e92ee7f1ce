#pragma once

// Scenario configuration: TOML-primary (JSON accepted) experiment files with
// strict validation. Unknown scenario ids, unknown probe kinds, and any
// unrecognized field are rejected at parse time; every error names the full
// field path ("probe[1].t_grid.ratio: must be > 1"). The seed is mandatory -
// runs never fall back to wall-clock entropy.
//
// Layout:
//   schema_version = 1
//   scenario = "ex1_chain"          # a registry id
//   seed = 42
//   [output]                        # optional
//   dir = "my_run"                  # default: the scenario id
//   [params]                        # optional, forwarded to the model factory
//   lambda = 2.0
//   [[probe]]
//   kind = "lower_bound"            # qt | pt | qt_measure | cesaro_gap |
//                                   # lower_bound | regularity |
//                                   # decomposition | weak_star | sweep
//   name = "c3_arc"                 # optional output stem
//   ...per-kind fields...
//
// Time grids are either explicit arrays (t_grid = [1.0, 2.0, 4.0]) or
// geometric descriptors (t_grid = {t0 = 2.0, ratio = 1.5, points = 10}).
// Points are arrays of coordinates (x = [0.5]); point lists are arrays of
// arrays (x_grid = [[0.0], [1.0]]).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergo/metric_space.hpp"

namespace ergo {

// Parse/validation failures; the CLI maps these to the config-error exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProbeSpec {
  std::string kind;
  std::string name;  // output stem; defaults to "<kind>_<index>"

  int f_index = 0;   // entry of the model's test-function dictionary
  int n_traj = 200;
  double t = 0.0;
  std::vector<double> t_grid;

  Point x;                      // qt / pt / qt_measure start
  std::vector<Point> centers;   // lower_bound z or K; sweep K
  std::vector<Point> x_grid;    // starts; empty = model default grid
  double eps = 0.0;
  double margin = 0.0;

  std::string notion;           // regularity notion
  Point z;                      // regularity base point; empty = model anchor
  std::vector<double> radii;
  double tol = 0.05;

  double cluster_tol = 0.1;
  int n_time_samples = 64;
  double support_eps = 0.05;

  std::string condition;        // C1 | C2 | C3 | C4 | C
  std::vector<int> n_values;    // cesaro_gap rows
};

struct ScenarioConfig {
  int schema_version = 1;
  std::string scenario;
  std::uint64_t seed = 0;
  std::string output_dir;       // defaults to the scenario id
  nlohmann::json params = nlohmann::json::object();
  std::vector<ProbeSpec> probes;
  nlohmann::json canonical;     // parsed document (hash/reproducibility basis)
};

// Validate a parsed document. Throws ConfigError with field paths.
ScenarioConfig parse_scenario_config(const nlohmann::json& doc);

// Read and parse a .toml or .json file; errors are prefixed with the path.
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace ergo
