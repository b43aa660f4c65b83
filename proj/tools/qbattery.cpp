// Copyright 2026 The qbattery Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qbattery: run battery-charging experiments from config files or presets.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "qbattery/blas_guard.hpp"
#include "qbattery/presets.hpp"
#include "qbattery/runner.hpp"

namespace {

int run_config(const qbattery::ExperimentConfig& config, const std::string& output) {
  auto c = config;
  if (!output.empty()) c.output.directory = output;
  const auto report = qbattery::run_experiment(c);
  std::cout << "wrote " << report.files.size() << " files to " << c.output.directory << '\n';
  if (report.partial) std::cout << "partial results: " << report.failures.size() << " failures\n";
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  qbattery::pin_blas_core_if_needed(argv);
  CLI::App app{"Spin-chain quantum battery charging simulator"};
  app.set_version_flag("--version", QBATTERY_VERSION);
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a config file or a figure preset");
  std::string config_path, preset, output;
  auto* file_opt = run->add_option("config", config_path, "Configuration file");
  auto* preset_opt = run->add_option("--preset", preset, "Figure preset name");
  file_opt->excludes(preset_opt);
  run->add_option("-o,--output", output, "Override output.directory");

  auto* list = app.add_subcommand("list-presets", "List figure presets");

  auto* check = app.add_subcommand("validate", "Parse and validate a config file");
  std::string check_path;
  check->add_option("config", check_path, "Configuration file")->required();
  bool print = false;
  check->add_flag("--print", print, "Print the canonical resolved config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& row : qbattery::list_presets()) {
        std::printf("%-7s %-11s %s\n", row.name.c_str(), row.figure.c_str(), row.summary.c_str());
      }
      return qbattery::kExitOk;
    }
    if (*check) {
      const auto c = qbattery::load_config(check_path);
      if (print) std::cout << qbattery::serialize_config(c);
      std::cout << "ok " << qbattery::config_hash(c) << '\n';
      return qbattery::kExitOk;
    }
    if (*run) {
      if (!preset.empty()) {
        auto c = qbattery::find_preset(preset);
        if (!c) throw qbattery::ConfigError("preset", "unknown preset '" + preset + "'");
        return run_config(*c, output);
      }
      if (config_path.empty()) {
        std::cerr << "run: give a config file or --preset <name>\n";
        return qbattery::kExitConfig;
      }
      return run_config(qbattery::load_config(config_path), output);
    }
  } catch (const qbattery::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return qbattery::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return qbattery::kExitFailure;
  }
  return qbattery::kExitOk;
}
