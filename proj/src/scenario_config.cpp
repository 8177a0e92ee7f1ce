#include "ergo/scenario_config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ergo/semigroup_models.hpp"
#include "ergo/toml_lite.hpp"

namespace ergo {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
}

double require_number(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& path, const std::string& key,
                 double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "must be a number");
  return v.get<double>();
}

int integer_or(const json& obj, const std::string& path, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "must be an integer");
  return v.get<int>();
}

std::string require_string(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required field");
  const json& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "must be a string");
  return v.get<std::string>();
}

Point parse_point(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "must be a nonempty array of coordinates");
  Point p;
  for (const auto& c : v) {
    if (!c.is_number()) fail(path, "coordinates must be numbers");
    p.push_back(c.get<double>());
  }
  return p;
}

std::vector<Point> parse_point_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "must be an array of points");
  std::vector<Point> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(parse_point(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Explicit array of times, or {t0, ratio, points} geometric descriptor.
std::vector<double> parse_t_grid(const json& v, const std::string& path) {
  if (v.is_array()) {
    if (v.size() < 4) fail(path, "needs at least 4 grid times");
    std::vector<double> grid;
    for (const auto& e : v) {
      if (!e.is_number()) fail(path, "grid times must be numbers");
      grid.push_back(e.get<double>());
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (!(grid[i] > 0.0)) fail(path, "grid times must be positive");
      if (i > 0 && !(grid[i] > grid[i - 1])) fail(path, "grid times must be strictly increasing");
    }
    return grid;
  }
  if (v.is_object()) {
    check_keys(v, path, {"t0", "ratio", "points"});
    const double t0 = require_number(v, path, "t0");
    const double ratio = number_or(v, path, "ratio", 1.5);
    const int points = integer_or(v, path, "points", 12);
    if (!(t0 > 0.0)) fail(path + ".t0", "must be > 0");
    if (!(ratio > 1.0)) fail(path + ".ratio", "must be > 1");
    if (points < 4) fail(path + ".points", "must be >= 4");
    std::vector<double> grid;
    double t = t0;
    for (int i = 0; i < points; ++i, t *= ratio) grid.push_back(t);
    return grid;
  }
  fail(path, "must be an array of times or {t0, ratio, points}");
}

const std::set<std::string> kConditions{"C1", "C2", "C3", "C4", "C"};
const std::set<std::string> kNotions{"e_property", "cesaro_e_property", "evc", "cesaro_evc"};

ProbeSpec parse_probe(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "must be a table");
  ProbeSpec p;
  p.kind = require_string(v, path, "kind");

  std::set<std::string> allowed{"kind", "name"};
  auto finish_keys = [&] { check_keys(v, path, allowed); };
  if (v.contains("name")) p.name = require_string(v, path, "name");

  auto get_n_traj = [&] {
    allowed.insert("n_traj");
    p.n_traj = integer_or(v, path, "n_traj", 200);
    if (p.n_traj < 2) fail(path + ".n_traj", "must be >= 2");
  };
  auto get_t_grid = [&] {
    allowed.insert("t_grid");
    if (!v.contains("t_grid")) fail(path + ".t_grid", "missing required field");
    p.t_grid = parse_t_grid(v.at("t_grid"), path + ".t_grid");
  };
  auto get_x = [&] {
    allowed.insert("x");
    if (!v.contains("x")) fail(path + ".x", "missing required field");
    p.x = parse_point(v.at("x"), path + ".x");
  };
  auto get_x_grid = [&](const char* key) {
    allowed.insert(key);
    if (v.contains(key)) {
      p.x_grid = parse_point_list(v.at(key), path + "." + key);
      if (p.x_grid.empty()) fail(path + "." + key, "must not be empty");
    }
  };
  auto get_t = [&] {
    allowed.insert("t");
    p.t = require_number(v, path, "t");
    if (!(p.t > 0.0)) fail(path + ".t", "must be > 0");
  };
  auto get_f_index = [&] {
    allowed.insert("f");
    p.f_index = integer_or(v, path, "f", 0);
    if (p.f_index < 0) fail(path + ".f", "must be >= 0");
  };

  if (p.kind == "qt" || p.kind == "pt") {
    get_x();
    get_t();
    get_f_index();
    get_n_traj();
  } else if (p.kind == "qt_measure") {
    get_x();
    get_t();
    get_n_traj();
    allowed.insert("n_time_samples");
    p.n_time_samples = integer_or(v, path, "n_time_samples", 64);
    if (p.n_time_samples < 1) fail(path + ".n_time_samples", "must be >= 1");
  } else if (p.kind == "cesaro_gap") {
    allowed.insert("n_values");
    if (!v.contains("n_values")) fail(path + ".n_values", "missing required field");
    const json& nv = v.at("n_values");
    if (!nv.is_array() || nv.empty()) fail(path + ".n_values", "must be a nonempty array");
    for (const auto& e : nv) {
      if (!e.is_number_integer() || e.get<int>() < 2)
        fail(path + ".n_values", "entries must be integers >= 2");
      p.n_values.push_back(e.get<int>());
    }
  } else if (p.kind == "lower_bound") {
    allowed.insert({"condition", "centers", "eps", "margin"});
    p.condition = require_string(v, path, "condition");
    if (!kConditions.count(p.condition))
      fail(path + ".condition", "must be one of C1, C2, C3, C4, C");
    if (!v.contains("centers")) fail(path + ".centers", "missing required field");
    p.centers = parse_point_list(v.at("centers"), path + ".centers");
    if (p.centers.empty()) fail(path + ".centers", "must not be empty");
    if (p.condition != "C" && p.centers.size() != 1)
      fail(path + ".centers", "conditions C1-C4 take exactly one center z");
    p.eps = require_number(v, path, "eps");
    if (!(p.eps > 0.0)) fail(path + ".eps", "must be > 0");
    p.margin = number_or(v, path, "margin", 0.0);
    if (p.margin < 0.0) fail(path + ".margin", "must be >= 0");
    get_x_grid("x_grid");
    get_t_grid();
    get_n_traj();
  } else if (p.kind == "regularity") {
    allowed.insert({"notion", "z", "radii", "tol"});
    p.notion = require_string(v, path, "notion");
    if (!kNotions.count(p.notion))
      fail(path + ".notion", "must be one of e_property, cesaro_e_property, evc, cesaro_evc");
    if (v.contains("z")) p.z = parse_point(v.at("z"), path + ".z");
    if (!v.contains("radii")) fail(path + ".radii", "missing required field");
    const json& rv = v.at("radii");
    if (!rv.is_array() || rv.empty()) fail(path + ".radii", "must be a nonempty array");
    for (const auto& e : rv) {
      if (!e.is_number()) fail(path + ".radii", "entries must be numbers");
      p.radii.push_back(e.get<double>());
    }
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
      if (!(p.radii[i] > 0.0)) fail(path + ".radii", "entries must be > 0");
      if (i > 0 && !(p.radii[i] < p.radii[i - 1]))
        fail(path + ".radii", "entries must be strictly decreasing");
    }
    p.tol = number_or(v, path, "tol", 0.05);
    if (!(p.tol > 0.0)) fail(path + ".tol", "must be > 0");
    get_f_index();
    get_t_grid();
    get_n_traj();
  } else if (p.kind == "decomposition") {
    allowed.insert({"cluster_tol", "n_time_samples", "support_eps"});
    get_x_grid("x_list");
    get_t();
    get_n_traj();
    p.cluster_tol = number_or(v, path, "cluster_tol", 0.1);
    if (!(p.cluster_tol > 0.0)) fail(path + ".cluster_tol", "must be > 0");
    p.n_time_samples = integer_or(v, path, "n_time_samples", 64);
    if (p.n_time_samples < 1) fail(path + ".n_time_samples", "must be >= 1");
    p.support_eps = number_or(v, path, "support_eps", 0.05);
    if (!(p.support_eps > 0.0)) fail(path + ".support_eps", "must be > 0");
  } else if (p.kind == "weak_star") {
    allowed.insert("tol");
    get_x_grid("x_list");
    get_t_grid();
    get_n_traj();
    p.tol = number_or(v, path, "tol", 0.05);
    if (!(p.tol > 0.0)) fail(path + ".tol", "must be > 0");
  } else if (p.kind == "sweep") {
    allowed.insert({"centers", "eps"});
    if (!v.contains("centers")) fail(path + ".centers", "missing required field");
    p.centers = parse_point_list(v.at("centers"), path + ".centers");
    if (p.centers.empty()) fail(path + ".centers", "must not be empty");
    p.eps = require_number(v, path, "eps");
    if (p.eps < 0.0) fail(path + ".eps", "must be >= 0");
    get_x_grid("x_list");
    get_t_grid();
    get_n_traj();
  } else {
    fail(path + ".kind",
         "unknown probe kind '" + p.kind +
             "' (expected qt, pt, qt_measure, cesaro_gap, lower_bound, regularity, "
             "decomposition, weak_star, or sweep)");
  }
  finish_keys();
  return p;
}

}  // namespace

ScenarioConfig parse_scenario_config(const json& doc) {
  if (!doc.is_object()) fail("config", "top level must be a table");
  check_keys(doc, "", {"schema_version", "scenario", "seed", "output", "params", "probe"});

  ScenarioConfig cfg;
  cfg.canonical = doc;

  if (!doc.contains("schema_version")) fail("schema_version", "missing required field");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != 1)
    fail("schema_version", "this build understands schema_version = 1 only");
  cfg.schema_version = 1;

  cfg.scenario = require_string(doc, "config", "scenario");
  const auto ids = model_ids();
  if (std::find(ids.begin(), ids.end(), cfg.scenario) == ids.end()) {
    std::string known;
    for (const auto& id : ids) known += (known.empty() ? "" : ", ") + id;
    fail("scenario", "unknown scenario id '" + cfg.scenario + "' (known: " + known + ")");
  }

  if (!doc.contains("seed")) fail("seed", "missing required field (no wall-clock default)");
  const json& seed = doc.at("seed");
  if (!seed.is_number_integer() || (seed.is_number_integer() && !seed.is_number_unsigned() &&
                                    seed.get<std::int64_t>() < 0))
    fail("seed", "must be a non-negative integer");
  cfg.seed = seed.get<std::uint64_t>();

  cfg.output_dir = cfg.scenario;
  if (doc.contains("output")) {
    const json& out = doc.at("output");
    if (!out.is_object()) fail("output", "must be a table");
    check_keys(out, "output", {"dir"});
    if (out.contains("dir")) {
      cfg.output_dir = require_string(out, "output", "dir");
      if (cfg.output_dir.empty() || cfg.output_dir.front() == '/' ||
          cfg.output_dir.find("..") != std::string::npos)
        fail("output.dir", "must be a relative path without '..'");
    }
  }

  if (doc.contains("params")) {
    const json& params = doc.at("params");
    if (!params.is_object()) fail("params", "must be a table");
    for (const auto& [key, value] : params.items())
      if (!value.is_number()) fail("params." + key, "model parameters must be numbers");
    cfg.params = params;
  }

  if (doc.contains("probe")) {
    const json& probes = doc.at("probe");
    if (!probes.is_array()) fail("probe", "must be an array of tables ([[probe]])");
    for (std::size_t i = 0; i < probes.size(); ++i) {
      auto p = parse_probe(probes[i], "probe[" + std::to_string(i) + "]");
      if (p.kind == "cesaro_gap" && cfg.scenario != "ex1_chain")
        fail("probe[" + std::to_string(i) + "].kind",
             "cesaro_gap is defined for scenario ex1_chain only");
      if (p.name.empty()) p.name = p.kind + "_" + std::to_string(i);
      cfg.probes.push_back(std::move(p));
    }
  }

  std::set<std::string> names;
  for (const auto& p : cfg.probes)
    if (!names.insert(p.name).second) fail("probe", "duplicate probe name '" + p.name + "'");

  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json doc;
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  try {
    if (ext == ".toml")
      doc = toml_lite_parse(text);
    else if (ext == ".json")
      doc = json::parse(text);
    else
      throw ConfigError("expected a .toml or .json file");
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }

  try {
    return parse_scenario_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace ergo
