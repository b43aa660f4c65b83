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

#pragma once

// Experiment execution and result files.
//
// Output directory layout:
//   series.csv                       single run: t,delta_e,power
//   sweep[_<charger>].csv            param,value,de_max,t_e,p_max,t_p
//   series[_<charger>]_<param>_<v>.csv  per sweep point when output.series
//   fit[_<charger>].json             P_max fit for sweeps of >= 3 points
//   manifest.json                    resolved parameters and run status

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbattery/config.hpp"
#include "qbattery/metrics.hpp"

#ifndef QBATTERY_VERSION
#define QBATTERY_VERSION "0.0.0"
#endif

namespace qbattery {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFailure = 3;

/// 12 significant digits in scientific notation.
inline std::string format_float(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

inline void write_series_csv(std::ostream& out, const TimeSeries& ts) {
  out << "t,delta_e,power\n";
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    out << format_float(ts.times[i]) << ',' << format_float(ts.delta_e[i]) << ','
        << format_float(ts.power[i]) << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << "param,value,de_max,t_e,p_max,t_p\n";
  for (const auto& r : records) {
    out << to_string(r.parameter) << ',' << format_float(r.value) << ',' << format_float(r.delta_e_max)
        << ',' << format_float(r.t_at_e_max) << ',' << format_float(r.p_max) << ','
        << format_float(r.t_at_p_max) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const HamiltonianSpec& s) {
  nlohmann::ordered_json j;
  j["family"] = to_string(s.family);
  if (s.h) j["h"] = *s.h;
  if (s.J) j["J"] = *s.J;
  if (s.gamma) j["gamma"] = *s.gamma;
  if (s.K) j["K"] = *s.K;
  return j;
}

inline nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  const auto& p = c.protocol;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["protocol"] = {{"N", p.num_qubits},
                   {"lambda", p.lambda},
                   {"t_on", p.t_on ? nlohmann::ordered_json(*p.t_on) : nlohmann::ordered_json("always")},
                   {"extended_lambda", p.extended_lambda},
                   {"literal_ata_sum", p.literal_ata_sum},
                   {"battery", to_json(p.battery)},
                   {"charger", to_json(p.charger)}};
  j["grid"] = {{"end", c.grid.end}, {"step", c.grid.step}, {"refinement", c.grid.refinement_factor}};
  j["backend"] = {{"kind", to_string(c.backend.kind)},
                  {"krylov_dim", c.backend.krylov_dim},
                  {"tolerance", c.backend.tolerance}};
  if (c.sweep) {
    auto chargers = nlohmann::ordered_json::array();
    for (const auto& ch : c.sweep->chargers) chargers.push_back(to_json(ch));
    j["sweep"] = {{"parameter", to_string(c.sweep->parameter)},
                  {"values", c.sweep->values},
                  {"chargers", chargers}};
  }
  j["output"] = {{"directory", c.output.directory}, {"series", c.output.series}};
  return j;
}

inline nlohmann::ordered_json to_json(const SweepRecord& r) {
  return {{"param", to_string(r.parameter)}, {"value", r.value},
          {"de_max", r.delta_e_max},         {"t_e", r.t_at_e_max},
          {"p_max", r.p_max},                {"t_p", r.t_at_p_max},
          {"boundary_max", r.boundary_max}};
}

struct RunReport {
  int exit_code = kExitOk;
  bool partial = false;
  bool boundary_max = false;
  std::vector<std::string> files;  // paths relative to the output directory
  std::vector<std::string> failures;
};

namespace detail {

inline void write_file(const std::filesystem::path& dir, const std::string& name,
                       const std::string& text, RunReport& report) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw ConfigError("output.directory", "cannot write " + (dir / name).string());
  out << text;
  report.files.push_back(name);
}

inline std::string fit_abscissa(SweepParameter p) {
  return p == SweepParameter::J ? "log10(J)" : std::string(to_string(p));
}

}  // namespace detail

/// Runs a validated config and writes its result files. Sweep points that
/// fail are reported and the remaining points are still written.
inline RunReport run_experiment(const ExperimentConfig& c, std::ostream& log = std::cerr) {
  namespace fs = std::filesystem;
  using nlohmann::ordered_json;
  detail::validate_config(c);
  const auto started = std::chrono::steady_clock::now();
  const fs::path dir = c.output.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("output.directory", "cannot create '" + dir.string() + "'");
  }

  RunReport report;
  ordered_json results;
  auto note_failure = [&](const std::string& what) {
    report.failures.push_back(what);
    log << "error: " << what << '\n';
  };

  if (!c.sweep) {
    try {
      const auto ts = stored_energy_series(c.protocol, c.grid, c.backend);
      std::ostringstream csv;
      write_series_csv(csv, ts);
      detail::write_file(dir, "series.csv", csv.str(), report);
      const auto r = summarize(ts, SweepParameter::Lambda, c.protocol.lambda);
      report.boundary_max = r.boundary_max;
      results = {{"de_max", r.delta_e_max}, {"t_e", r.t_at_e_max},
                 {"p_max", r.p_max},        {"t_p", r.t_at_p_max}};
    } catch (const std::exception& e) {
      note_failure(std::string("run failed: ") + e.what());
      report.partial = true;
    }
  } else {
    const auto& s = *c.sweep;
    std::vector<std::optional<HamiltonianSpec>> groups;
    if (s.chargers.empty()) {
      groups.emplace_back(std::nullopt);
    } else {
      for (const auto& ch : s.chargers) groups.emplace_back(ch);
    }
    results = ordered_json::object();
    for (const auto& group : groups) {
      ProtocolSpec base = c.protocol;
      std::string label;
      if (group) {
        base.charger = *group;
        label = std::string(to_string(group->family));
      }
      const std::string suffix = label.empty() ? "" : "_" + label;
      const auto sweep = run_sweep(base, s.parameter, s.values, c.grid, c.backend);
      for (const auto& [value, message] : sweep.failures) {
        note_failure((label.empty() ? "" : label + " ") + std::string(to_string(s.parameter)) + " = " +
                     format_exact(value) + ": " + message);
      }
      report.partial = report.partial || sweep.partial();

      std::ostringstream csv;
      write_sweep_csv(csv, sweep.records);
      detail::write_file(dir, "sweep" + suffix + ".csv", csv.str(), report);
      if (c.output.series) {
        for (std::size_t i = 0; i < sweep.records.size(); ++i) {
          std::ostringstream series;
          write_series_csv(series, sweep.series[i]);
          detail::write_file(dir,
                             "series" + suffix + "_" + std::string(to_string(s.parameter)) + "_" +
                                 format_exact(sweep.records[i].value) + ".csv",
                             series.str(), report);
        }
      }
      auto records = ordered_json::array();
      for (const auto& r : sweep.records) {
        records.push_back(to_json(r));
        report.boundary_max = report.boundary_max || r.boundary_max;
      }
      ordered_json entry{{"records", records}};
      if (sweep.records.size() >= 3) {
        std::vector<double> x, y;
        for (const auto& r : sweep.records) {
          x.push_back(r.value);
          y.push_back(r.p_max);
        }
        const auto fit = s.parameter == SweepParameter::J ? log10_fit(x, y) : linear_fit(x, y);
        ordered_json fit_json{{"abscissa", detail::fit_abscissa(s.parameter)},
                              {"slope", fit.slope},
                              {"intercept", fit.intercept},
                              {"r2", fit.r_squared}};
        detail::write_file(dir, "fit" + suffix + ".json", fit_json.dump(2) + "\n", report);
        entry["p_max_fit"] = fit_json;
      }
      results[label.empty() ? "sweep" : label] = entry;
    }
  }

  if (report.boundary_max) {
    log << "warning: a maximum sits on the final grid time; consider a longer grid.end\n";
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  ordered_json manifest;
  manifest["software"] = "qbattery";
  manifest["version"] = QBATTERY_VERSION;
  manifest["config_hash"] = config_hash(c);
  manifest["config"] = to_json(c);
  manifest["backend"] = to_string(c.backend.kind);
  manifest["grid"] = {{"end", c.grid.end}, {"step", c.grid.step}, {"refinement", c.grid.refinement_factor}};
  manifest["ata_convention"] = c.protocol.literal_ata_sum ? "literal" : "single";
  manifest["workers"] = default_workers();
  manifest["wall_time_s"] = wall;
  manifest["boundary_max"] = report.boundary_max;
  manifest["partial"] = report.partial;
  manifest["failures"] = report.failures;
  manifest["results"] = results;
  auto files = report.files;
  manifest["files"] = files;
  detail::write_file(dir, "manifest.json", manifest.dump(2) + "\n", report);
  report.exit_code = report.failures.empty() ? kExitOk : kExitFailure;
  return report;
}

}  // namespace qbattery
