#pragma once

// Scenario registry: one row per model id with a behavioral description and
// the registered numeric targets. Target provenance is either "analytic"
// (closed form for this model family, reproduced in code) or "derived"
// (value backed by an independent oracle in the test suite). Scenarios
// without numeric targets are property-only: their guarantees are checked by
// property suites rather than by a single number.

#include <string>
#include <vector>

namespace ergo {

struct RegisteredTarget {
  std::string label;
  double value = 0.0;
  std::string provenance;  // "analytic" | "derived"
};

struct ScenarioInfo {
  std::string id;           // equals the model id
  std::string description;  // one-line behavioral summary
  std::vector<RegisteredTarget> targets;  // empty = property-only
};

const std::vector<ScenarioInfo>& scenario_registry();

// nullptr when the id is not registered.
const ScenarioInfo* find_scenario(const std::string& id);

// Fixed-width text table: id, description, targets (or "property-only").
std::string list_scenarios_table();

}  // namespace ergo
