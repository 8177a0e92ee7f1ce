// Command-line runner.
//
//   ergo run <config>          execute a scenario file, write payloads + manifest
//   ergo list-scenarios        print the registry with registered targets
//   ergo acceptance            run the acceptance gate (--seed N, --quick)
//
// Output root: $ERGO_OUTPUT_ROOT if set, else ./ergo_out; each run writes into
// <root>/<output.dir> (default: the scenario id). Exit codes: 0 ok,
// 1 acceptance criterion failed, 2 config/usage error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergo/acceptance.hpp"
#include "ergo/registry.hpp"
#include "ergo/run_manifest.hpp"
#include "ergo/scenario_config.hpp"
#include "ergo/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stochastic-semigroup ergodicity toolkit"};
  app.set_version_flag("--version", ergo::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "execute a scenario config and write result payloads");
  run->add_option("config", config_path, "path to a .toml or .json scenario file")->required();

  auto* list = app.add_subcommand("list-scenarios", "print registry ids and registered targets");

  std::uint64_t seed = ergo::kAcceptanceDefaultSeed;
  bool quick = false;
  auto* acc = app.add_subcommand("acceptance", "run the acceptance criteria suite");
  acc->add_option("--seed", seed, "Monte Carlo seed (default: the pinned suite seed)");
  acc->add_flag("--quick", quick, "tenth-scale Monte Carlo smoke run");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // malformed usage is a config error
  }

  try {
    if (run->parsed()) {
      const auto cfg = ergo::load_scenario_config(config_path);
      const char* root = std::getenv("ERGO_OUTPUT_ROOT");
      const std::filesystem::path out =
          std::filesystem::path(root != nullptr ? root : "ergo_out") /
          (cfg.output_dir.empty() ? cfg.scenario : cfg.output_dir);
      const auto manifest = ergo::run_scenario(cfg, out.string());
      std::cout << ergo::summary_table(manifest);
      std::cout << "results written to " << out.string() << "\n";
      return 0;  // probe failures are isolated and flagged, not process failures
    }
    if (list->parsed()) {
      std::cout << ergo::list_scenarios_table();
      return 0;
    }
    const auto report = ergo::run_acceptance(seed, quick);
    std::cout << ergo::acceptance_text(report);
    return report.all_passed ? 0 : 1;
  } catch (const ergo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
