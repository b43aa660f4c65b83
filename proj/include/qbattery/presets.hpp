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

// Named experiment bindings, one per figure panel.

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qbattery/config.hpp"

namespace qbattery {

struct FigurePreset {
  std::string name;
  std::string figure;  // panel label, e.g. "Fig. 3(a)"
  std::string note;
  ExperimentConfig config;
};

namespace detail {

inline ExperimentConfig preset_base(std::string name, HamiltonianSpec battery,
                                    HamiltonianSpec charger, int n, double lambda) {
  ExperimentConfig c;
  c.name = name;
  c.protocol = ProtocolSpec{battery, charger, lambda, std::nullopt, n};
  c.output.directory = "results/" + name;
  return c;
}

inline SweepSpec sweep_of(SweepParameter p, std::vector<double> values,
                          std::vector<HamiltonianSpec> chargers = {}) {
  return {p, std::move(values), std::move(chargers)};
}

inline std::vector<FigurePreset> build_presets() {
  constexpr double kGamma = 0.5;
  const auto fz = HamiltonianSpec::field_z(1.0);
  const std::vector<double> lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<HamiltonianSpec> four_chargers{
      HamiltonianSpec::ising_ata(), HamiltonianSpec::ising_nn(),
      HamiltonianSpec::xy_ata(kGamma), HamiltonianSpec::xy_nn(kGamma)};
  std::vector<double> sizes;
  for (int n = 4; n <= 12; ++n) sizes.push_back(n);
  std::vector<double> extended;
  for (int i = 0; i <= 50; ++i) extended.push_back(i / 10.0);

  std::vector<FigurePreset> out;
  auto add = [&](std::string name, std::string figure, std::string note, ExperimentConfig c) {
    out.push_back({std::move(name), std::move(figure), std::move(note), std::move(c)});
  };

  for (auto [name, panel, what] : {std::tuple{"fig2a", "Fig. 2(a)", "stored energy vs t per lambda"},
                                   std::tuple{"fig2b", "Fig. 2(b)", "power vs t per lambda"}}) {
    auto c = preset_base(name, fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::Lambda, lambdas);
    add(name, panel, what, std::move(c));
  }
  {
    auto c = preset_base("fig2c1", fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::N, {7, 9, 11});
    add("fig2c1", "Fig. 2(c1)", "odd N stored energy vs t", std::move(c));
  }
  {
    auto c = preset_base("fig2c2", fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::N, {8, 10, 12});
    add("fig2c2", "Fig. 2(c2)", "even N stored energy vs t", std::move(c));
  }
  {
    auto c = preset_base("fig2d", fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::N, {7, 8, 9, 10, 11, 12});
    add("fig2d", "Fig. 2(d)", "power vs t per N", std::move(c));
  }
  for (auto [name, panel, what] : {std::tuple{"fig3a", "Fig. 3(a)", "max stored energy vs lambda"},
                                   std::tuple{"fig3b", "Fig. 3(b)", "max power vs lambda"}}) {
    auto c = preset_base(name, fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::Lambda, lambdas, four_chargers);
    c.output.series = false;
    add(name, panel, what, std::move(c));
  }
  for (auto [name, panel, what] : {std::tuple{"fig3c", "Fig. 3(c)", "max stored energy vs N"},
                                   std::tuple{"fig3d", "Fig. 3(d)", "max power vs N"}}) {
    auto c = preset_base(name, fz, HamiltonianSpec::ising_ata(), 10, 1.0);
    c.sweep = sweep_of(SweepParameter::N, sizes, four_chargers);
    c.output.series = false;
    add(name, panel, what, std::move(c));
  }
  for (auto [name, panel, battery, what] :
       {std::tuple{"fig4a", "Fig. 4(a)", HamiltonianSpec::ising_nn(), "stored energy vs t"},
        std::tuple{"fig4b", "Fig. 4(b)", HamiltonianSpec::ising_nn(), "power vs t"},
        std::tuple{"fig4c", "Fig. 4(c)", HamiltonianSpec::xy_nn(kGamma), "stored energy vs t"},
        std::tuple{"fig4d", "Fig. 4(d)", HamiltonianSpec::xy_nn(kGamma), "power vs t"}}) {
    auto c = preset_base(name, battery, fz, 12, 0.0);
    c.sweep = sweep_of(SweepParameter::Lambda, {0.0, 1.0});
    add(name, panel, what, std::move(c));
  }
  for (auto [name, panel, what] : {std::tuple{"fig5a", "Fig. 5(a)", "stored energy vs t per J"},
                                   std::tuple{"fig5b", "Fig. 5(b)", "power vs t per J"}}) {
    auto c = preset_base(name, HamiltonianSpec::ising_nn(), fz, 12, 0.0);
    c.sweep = sweep_of(SweepParameter::J, {0.25, 0.5, 1.0, 2.0, 4.0, 8.0});
    add(name, panel, what, std::move(c));
  }
  for (auto [name, panel, battery, charger, what] :
       {std::tuple{"fig6a", "Fig. 6(a)", HamiltonianSpec::ising_nn(), HamiltonianSpec::xy_nn(kGamma),
                   "stored energy vs t"},
        std::tuple{"fig6b", "Fig. 6(b)", HamiltonianSpec::ising_nn(), HamiltonianSpec::xy_nn(kGamma),
                   "power vs t"},
        std::tuple{"fig6c", "Fig. 6(c)", HamiltonianSpec::xy_nn(kGamma), HamiltonianSpec::ising_nn(),
                   "stored energy vs t"},
        std::tuple{"fig6d", "Fig. 6(d)", HamiltonianSpec::xy_nn(kGamma), HamiltonianSpec::ising_nn(),
                   "power vs t"}}) {
    auto c = preset_base(name, battery, charger, 12, 0.0);
    c.sweep = sweep_of(SweepParameter::Lambda, {0.0, 1.0});
    add(name, panel, what, std::move(c));
  }
  for (auto [name, panel, charger] :
       {std::tuple{"fig7a", "Fig. 7(a)", HamiltonianSpec::ising_ata()},
        std::tuple{"fig7b", "Fig. 7(b)", HamiltonianSpec::xy_ata(kGamma)}}) {
    auto c = preset_base(name, fz, charger, 10, 0.0);
    c.protocol.extended_lambda = true;
    c.sweep = sweep_of(SweepParameter::Lambda, extended);
    c.output.series = false;
    add(name, panel, "power vs t per extended lambda", std::move(c));
  }
  return out;
}

inline std::string format_value(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace detail

/// Every preset, in figure order.
inline const std::vector<FigurePreset>& figure_presets() {
  static const std::vector<FigurePreset> presets = detail::build_presets();
  return presets;
}

inline std::optional<ExperimentConfig> find_preset(std::string_view name) {
  for (const auto& p : figure_presets()) {
    if (p.name == name) return p.config;
  }
  return std::nullopt;
}

/// One-line parameter summary, e.g.
/// "battery=IsingNN charger=FieldZ lambda=0 sweep=J".
inline std::string preset_summary(const FigurePreset& p) {
  const auto& c = p.config;
  std::ostringstream s;
  s << "battery=" << to_string(c.protocol.battery.family) << " charger=";
  if (c.sweep && !c.sweep->chargers.empty()) {
    for (std::size_t i = 0; i < c.sweep->chargers.size(); ++i) {
      s << (i ? "," : "") << to_string(c.sweep->chargers[i].family);
    }
  } else {
    s << to_string(c.protocol.charger.family);
  }
  if (!(c.sweep && c.sweep->parameter == SweepParameter::Lambda)) {
    s << " lambda=" << detail::format_value(c.protocol.lambda);
  }
  if (c.sweep) {
    s << " sweep=" << to_string(c.sweep->parameter);
    const auto& v = c.sweep->values;
    if (v.size() <= 6) {
      s << '{';
      for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << detail::format_value(v[i]);
      s << '}';
    } else {
      s << '[' << detail::format_value(v.front()) << ".." << detail::format_value(v.back()) << ']';
    }
  }
  if (!(c.sweep && c.sweep->parameter == SweepParameter::N)) s << " N=" << c.protocol.num_qubits;
  if (c.protocol.extended_lambda) s << " extended";
  s << " (" << p.note << ')';
  return s.str();
}

struct PresetRow {
  std::string name;
  std::string summary;
  std::string figure;
};

inline std::vector<PresetRow> list_presets() {
  std::vector<PresetRow> rows;
  for (const auto& p : figure_presets()) rows.push_back({p.name, preset_summary(p), p.figure});
  return rows;
}

}  // namespace qbattery
