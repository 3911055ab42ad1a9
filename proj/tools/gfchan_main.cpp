// Experiment runner for the continuous-time Gaussian feedback channel lab.
//
// Subcommands:
//   run <config>       execute an experiment, write CSV tables + manifest
//   validate <config>  schema-check a config without executing
//   list-channels      print the builtin channel names
//
// Exit codes: 0 success, 1 config error, 2 invariant failure, 3 runtime error.
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gfchan/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gfchan: simulation lab for continuous-time Gaussian feedback channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir_override;
  std::int64_t seed_override = -1;
  int threads_override = 0;
  bool deterministic = false;

  CLI::App* run = app.add_subcommand("run", "execute an experiment from a config file");
  run->add_option("config", config_path, "path to the config file")->required();
  run->add_option("--seed", seed_override, "override the config seed");
  run->add_option("--threads", threads_override, "override the worker count");
  run->add_option("--output-dir", output_dir_override, "override the output directory");
  run->add_flag("--deterministic", deterministic, "force fixed reduction order (always on; accepted for compatibility)");

  CLI::App* validate = app.add_subcommand("validate", "schema-check a config file");
  validate->add_option("config", config_path, "path to the config file")->required();

  CLI::App* list = app.add_subcommand("list-channels", "print builtin channel names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& name : gfchan::known_channels()) std::cout << name << "\n";
      return 0;
    }

    gfchan::ExperimentConfig cfg;
    const auto errors = gfchan::load_config(config_path, cfg);
    if (validate->parsed()) {
      if (errors.empty()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
      return 1;
    }

    if (!errors.empty()) {
      for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
      return 1;
    }
    if (seed_override >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed_override);
      cfg.echo["seed"] = std::to_string(cfg.seed);
    }
    if (threads_override > 0) {
      cfg.threads = threads_override;
      cfg.echo["threads"] = std::to_string(threads_override);
    }
    if (!output_dir_override.empty()) {
      cfg.output_dir = output_dir_override;
      cfg.echo["output_dir"] = output_dir_override;
    }

    const gfchan::RunManifest man = gfchan::run_experiment(cfg);
    for (const auto& c : man.invariants) {
      std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "\n";
    }
    for (const auto& f : man.output_files) std::cout << "wrote " << f << "\n";
    return man.exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
