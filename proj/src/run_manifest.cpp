#include "ergo/run_manifest.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "ergo/countable_chain.hpp"
#include "ergo/probes.hpp"
#include "ergo/registry.hpp"
#include "ergo/semigroup_models.hpp"
#include "ergo/version.hpp"

namespace ergo {

namespace {

using nlohmann::json;

LowerBoundCondition condition_from(const std::string& s) {
  if (s == "C1") return LowerBoundCondition::C1;
  if (s == "C2") return LowerBoundCondition::C2;
  if (s == "C3") return LowerBoundCondition::C3;
  if (s == "C4") return LowerBoundCondition::C4;
  if (s == "C") return LowerBoundCondition::C;
  throw std::invalid_argument("unknown condition '" + s + "'");
}

RegularityNotion notion_from(const std::string& s) {
  if (s == "e_property") return RegularityNotion::EProp;
  if (s == "cesaro_e_property") return RegularityNotion::CesaroEProp;
  if (s == "evc") return RegularityNotion::Evc;
  if (s == "cesaro_evc") return RegularityNotion::CesaroEvc;
  throw std::invalid_argument("unknown notion '" + s + "'");
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << bytes;
}

const TestFunction& dictionary_entry(const SemigroupModel& model, int index,
                                     const std::string& probe_name) {
  if (index < 0 || static_cast<std::size_t>(index) >= model.f_dictionary.size())
    throw std::invalid_argument("probe " + probe_name + ": f index " + std::to_string(index) +
                                " out of range (dictionary has " +
                                std::to_string(model.f_dictionary.size()) + " entries)");
  return model.f_dictionary[static_cast<std::size_t>(index)];
}

json estimate_json(const CesaroEstimate& est, const std::string& f_name) {
  return json{{"version", kVersion},  {"value", est.value},
              {"std_error", est.std_error}, {"n_trajectories", est.n_trajectories},
              {"t", est.t},           {"method", est.method},
              {"f", f_name}};
}

// Exact Cesaro gap rows for the absorbing chain: one row per n.
json cesaro_gap_json(const ProbeSpec& p, std::string* csv_out, double* min_gap_out) {
  const TestFunction f = make_coordinate_clamp(0, 0.0, 1.0, "min_x_1");
  json rows = json::array();
  std::ostringstream csv;
  csv.precision(17);
  csv << "n,q_at_inv_n,q_at_0,gap\n";
  double min_gap = std::numeric_limits<double>::infinity();
  for (int n : p.n_values) {
    const double t = static_cast<double>(n);
    const double at_inv = cesaro_exact(ChainScenario::Example1, f, 1.0 / n, t, 1e-10);
    const double at_zero = cesaro_exact(ChainScenario::Example1, f, 0.0, t, 1e-10);
    const double gap = at_inv - at_zero;
    min_gap = std::min(min_gap, gap);
    rows.push_back({{"n", n}, {"q_at_inv_n", at_inv}, {"q_at_0", at_zero}, {"gap", gap}});
    csv << n << "," << at_inv << "," << at_zero << "," << gap << "\n";
  }
  *csv_out = csv.str();
  *min_gap_out = min_gap;
  const double target = 1.0 - 2.0 * std::exp(-1.0);
  return json{{"version", kVersion},
              {"rows", rows},
              {"min_gap", min_gap},
              {"target", target},
              {"target_provenance", "analytic"},
              {"holds", min_gap >= target - 1e-12}};
}

struct ProbeFiles {
  json main;                       // written to <name>.json
  std::string csv;                 // written to <name>.csv when nonempty
  std::string extra_csv;           // optional second payload
  std::string extra_csv_suffix;    // e.g. "_atoms"
  double headline = 0.0;
  std::string verdict;
};

ProbeFiles execute_probe(const SemigroupModel& model, const ScenarioConfig& cfg,
                         const ProbeSpec& p) {
  ProbeFiles out;
  const auto starts = [&](const std::vector<Point>& given) {
    return given.empty() ? model.default_x_grid : given;
  };

  if (p.kind == "qt" || p.kind == "pt") {
    const TestFunction& f = dictionary_entry(model, p.f_index, p.name);
    const auto est = p.kind == "qt" ? estimate_Qt(model, f, p.x, p.t, p.n_traj, cfg.seed)
                                    : estimate_Pt(model, f, p.x, p.t, p.n_traj, cfg.seed);
    out.main = estimate_json(est, f.name);
    out.headline = est.value;
  } else if (p.kind == "qt_measure") {
    const auto m =
        estimate_Qt_measure(model, p.x, p.t, p.n_traj, p.n_time_samples, cfg.seed);
    out.main = json::parse(m.to_json(model.space));
    out.main["version"] = kVersion;
    std::ostringstream csv;
    m.write_csv(csv);
    out.csv = csv.str();
    out.headline = static_cast<double>(m.merged().size());
  } else if (p.kind == "cesaro_gap") {
    out.main = cesaro_gap_json(p, &out.csv, &out.headline);
    out.verdict = out.main.at("holds").get<bool>() ? "supported" : "refuted";
  } else if (p.kind == "lower_bound") {
    const auto report =
        probe_lower_bound(model, condition_from(p.condition), p.centers, p.eps,
                          starts(p.x_grid), p.t_grid, p.n_traj, cfg.seed, p.margin);
    out.main = report_to_json(report);
    out.csv = report_to_csv(report);
    out.headline = report.proxy;
    out.verdict = report.verdict;
  } else if (p.kind == "regularity") {
    const TestFunction& f = dictionary_entry(model, p.f_index, p.name);
    const Point z = p.z.empty() ? model.anchor : p.z;
    const auto report = probe_regularity(model, notion_from(p.notion), z, f, p.radii, p.t_grid,
                                         p.n_traj, cfg.seed, p.tol);
    out.main = report_to_json(report);
    out.csv = report_to_csv(report);
    out.headline = report.proxy;
    out.verdict = report.verdict;
  } else if (p.kind == "decomposition") {
    const auto report = ergodic_decomposition(model, starts(p.x_grid), p.t, p.n_traj,
                                              p.cluster_tol, cfg.seed, p.n_time_samples,
                                              p.support_eps);
    out.main = decomposition_to_json(report, model.space);
    out.csv = decomposition_to_csv(report);
    out.headline = static_cast<double>(report.clusters.size());
    out.verdict = report.emds_violation ? "emds_violation" : "clean";
  } else if (p.kind == "weak_star") {
    const auto report = weak_star_mean_ergodicity_check(model, starts(p.x_grid),
                                                        model.f_dictionary, p.t_grid, p.n_traj,
                                                        cfg.seed, p.tol);
    out.main = report_to_json(report);
    out.csv = report_to_csv(report);
    out.headline = report.proxy;
    out.verdict = report.verdict;
  } else if (p.kind == "sweep") {
    const auto report =
        sweep_check(model, p.centers, p.eps, starts(p.x_grid), p.t_grid, p.n_traj, cfg.seed);
    out.main = report_to_json(report);
    out.csv = report_to_csv(report);
    out.headline = report.proxy;
    out.verdict = report.verdict;
  } else {
    throw std::logic_error("unhandled probe kind '" + p.kind + "'");
  }
  return out;
}

int start_count(const SemigroupModel& model, const ProbeSpec& p) {
  if (p.kind == "qt" || p.kind == "pt" || p.kind == "qt_measure") return 1;
  if (p.kind == "cesaro_gap") return 0;  // exact, consumes no streams
  const auto& grid = p.x_grid.empty() ? model.default_x_grid : p.x_grid;
  if (p.kind == "lower_bound" && p.condition == "C1") return static_cast<int>(p.centers.size());
  if (p.kind == "regularity") return static_cast<int>(p.radii.size()) + 1;  // z + each sphere start
  return static_cast<int>(grid.size());
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a offset basis
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const json& canonical) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical.dump());
  return os.str();
}

RunManifest run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  const auto t_start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(out_dir);

  const SemigroupModel model = make_model(cfg.scenario, cfg.params);

  RunManifest manifest;
  manifest.config_hash = config_hash(cfg.canonical);
  manifest.version = kVersion;
  manifest.scenario = cfg.scenario;
  manifest.seed = cfg.seed;

  for (const auto& p : cfg.probes) {
    ProbeOutcome outcome;
    outcome.name = p.name;
    outcome.kind = p.kind;
    try {
      ProbeFiles files = execute_probe(model, cfg, p);
      const std::string json_name = p.name + ".json";
      write_file(std::filesystem::path(out_dir) / json_name, files.main.dump(2) + "\n");
      outcome.files.push_back(json_name);
      if (!files.csv.empty()) {
        const std::string csv_name = p.name + ".csv";
        write_file(std::filesystem::path(out_dir) / csv_name, files.csv);
        outcome.files.push_back(csv_name);
      }
      outcome.status = "ok";
      outcome.verdict = files.verdict;
      outcome.headline = files.headline;
    } catch (const std::exception& e) {
      outcome.status = "error";
      outcome.error = e.what();
      manifest.partial = true;
    }
    manifest.rng_accounting.push_back(
        {{"probe", p.name},
         {"seed", cfg.seed},
         {"trajectory_streams_per_start", p.kind == "cesaro_gap" ? 0 : p.n_traj},
         {"start_points", start_count(model, p)},
         {"probe_time_substream_tag", kTagProbeTime}});
    manifest.outcomes.push_back(std::move(outcome));
  }

  write_file(std::filesystem::path(out_dir) / "summary.txt", summary_table(manifest));

  manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  write_file(std::filesystem::path(out_dir) / "manifest.json",
             manifest_to_json(manifest).dump(2) + "\n");
  return manifest;
}

nlohmann::json manifest_to_json(const RunManifest& m) {
  json outcomes = json::array();
  for (const auto& o : m.outcomes) {
    json row{{"name", o.name},       {"kind", o.kind},   {"status", o.status},
             {"verdict", o.verdict}, {"headline", o.headline}, {"files", o.files}};
    if (!o.error.empty()) row["error"] = o.error;
    outcomes.push_back(row);
  }
  return json{{"config_hash", m.config_hash}, {"version", m.version},
              {"scenario", m.scenario},       {"seed", m.seed},
              {"partial", m.partial},         {"wall_seconds", m.wall_seconds},
              {"outcomes", outcomes},         {"rng_accounting", m.rng_accounting}};
}

std::string summary_table(const RunManifest& m) {
  std::ostringstream os;
  os << "scenario " << m.scenario << "  seed " << m.seed << "  config " << m.config_hash
     << "  version " << m.version << "\n";
  os << std::left << std::setw(22) << "probe" << std::setw(16) << "kind" << std::setw(8)
     << "status" << std::setw(24) << "verdict" << "headline\n";
  os << std::string(86, '-') << "\n";
  for (const auto& o : m.outcomes) {
    os << std::left << std::setw(22) << o.name << std::setw(16) << o.kind << std::setw(8)
       << o.status << std::setw(24) << (o.status == "ok" ? o.verdict : o.error);
    os << std::setprecision(10) << o.headline << "\n";
  }
  if (const ScenarioInfo* info = find_scenario(m.scenario)) {
    if (info->targets.empty()) {
      os << "registered targets: property-only\n";
    } else {
      os << "registered targets:\n";
      for (const auto& t : info->targets)
        os << "  " << t.label << " = " << std::setprecision(10) << t.value << "  ["
           << t.provenance << "]\n";
    }
  }
  if (m.partial) os << "PARTIAL RUN: at least one probe failed\n";
  return os.str();
}

}  // namespace ergo
