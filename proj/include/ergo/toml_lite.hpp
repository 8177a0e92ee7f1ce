#pragma once

// Minimal TOML reader covering the scenario-file subset: bare and dotted
// keys, basic "..." strings, 64-bit integers, floats, booleans, nested
// (possibly multi-line) arrays, single-line inline tables {k = v}, [table]
// headers, [[array-of-tables]] headers, and # comments. Literal strings,
// multi-line strings, datetimes, and numeric underscores are rejected.
//
// Tables map to JSON objects, arrays-of-tables to JSON arrays of objects,
// integers to JSON integers, floats to JSON doubles. Duplicate keys and
// table redefinitions are errors. All errors carry the 1-based line number:
// "line 12: expected '=' after key 'seed'".

#include <string>

#include <nlohmann/json.hpp>

namespace ergo {

nlohmann::json toml_lite_parse(const std::string& text);

}  // namespace ergo
