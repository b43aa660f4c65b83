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

#include <catch_amalgamated.hpp>

#include <set>
#include <string>

#include "qbattery/config.hpp"
#include "qbattery/presets.hpp"

using namespace qbattery;

namespace {

const char* kMinimal = R"(
[protocol]
battery.family = FieldZ
battery.h = 1
charger.family = IsingATA
N = 8
lambda = 0.5
)";

std::string error_key(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("a minimal document gets every default") {
  const auto c = parse_config(kMinimal);
  CHECK(c.protocol.num_qubits == 8);
  CHECK(c.protocol.lambda == 0.5);
  CHECK(c.protocol.battery == HamiltonianSpec::field_z(1.0));
  CHECK(c.protocol.charger == HamiltonianSpec{Family::IsingATA, {}, {}, {}, {}});
  CHECK_FALSE(c.protocol.t_on);
  CHECK_FALSE(c.protocol.extended_lambda);
  CHECK_FALSE(c.protocol.literal_ata_sum);
  CHECK(c.grid == TimeGrid{100.0, 0.05, 10});
  CHECK(c.backend == PropagatorBackend::dense());
  CHECK_FALSE(c.sweep);
  CHECK(c.output.directory == "results");
}

TEST_CASE("lambda beyond one needs extended mode") {
  CHECK(error_key(std::string(kMinimal) + "lambda = 2.0\n") == "protocol.lambda");
  const std::string doc = R"(
[protocol]
battery.family = FieldZ
battery.h = 1
charger.family = IsingATA
N = 8
lambda = 2.0
extended_lambda = false
)";
  CHECK(error_key(doc) == "protocol.lambda");
  std::string extended = doc;
  extended.replace(extended.find("false"), 5, "true");
  CHECK(parse_config(extended).protocol.lambda == 2.0);
}

TEST_CASE("a preset reference resolves to its binding") {
  const auto c = parse_config("preset = \"fig2a\"\n");
  CHECK(c == *find_preset("fig2a"));
  CHECK(c.protocol.num_qubits == 10);
  CHECK(c.protocol.battery == HamiltonianSpec::field_z(1.0));
  CHECK(c.protocol.charger == HamiltonianSpec::ising_ata(1.0));
}

TEST_CASE("document keys override the preset") {
  const auto c = parse_config("preset = fig7b\n[protocol]\nN = 8\n[grid]\nend = 30\n[backend]\nkind = krylov\n");
  CHECK(c.protocol.num_qubits == 8);
  CHECK(c.grid.end == 30.0);
  CHECK(c.backend.kind == BackendKind::KrylovLanczos);
  CHECK(c.protocol.extended_lambda);
  const auto swapped = parse_config("preset = fig4a\n[protocol]\nbattery.family = XYNN\nbattery.gamma = 0.25\n");
  CHECK(swapped.protocol.battery == HamiltonianSpec{Family::XYNN, {}, {}, 0.25, {}});
}

TEST_CASE("validation errors name the offending key") {
  CHECK(error_key(std::string(kMinimal) + "bogus = 1\n") == "protocol.bogus");
  CHECK(error_key(std::string(kMinimal) + "[grid]\nstep = fast\n") == "grid.step");
  CHECK(error_key(std::string(kMinimal) + "[grid]\nstep = -1\n") == "grid.step");
  CHECK(error_key(std::string(kMinimal) + "[grid]\nend = 0\n") == "grid.end");
  CHECK(error_key(std::string(kMinimal) + "[grid]\nrefinement = 0\n") == "grid.refinement");
  CHECK(error_key(std::string(kMinimal) + "[backend]\nkind = magic\n") == "backend.kind");
  CHECK(error_key(std::string(kMinimal) + "[backend]\nkrylov_dim = 1\n") == "backend.krylov_dim");
  CHECK(error_key(std::string(kMinimal) + "[backend]\ntolerance = 0\n") == "backend.tolerance");
  CHECK(error_key(std::string(kMinimal) + "[weird]\n") == "weird");
  CHECK(error_key(std::string(kMinimal) + "N = 9\n") == "protocol.N");
  CHECK(error_key(std::string(kMinimal) + "t_on = -1\n") == "protocol.t_on");
  CHECK(error_key(std::string(kMinimal) + "extended_lambda = yes\n") == "protocol.extended_lambda");
  CHECK(error_key(std::string(kMinimal) + "charger.gamma = 0.5\n") == "protocol.charger.gamma");
  CHECK(error_key(std::string(kMinimal) + "charger.h = 0.5\n") == "protocol.charger.h");
  CHECK(error_key(std::string(kMinimal) + "charger.K = 9\n") == "protocol.charger.K");
  CHECK(error_key(std::string(kMinimal) + "battery.J = 1\n") == "protocol.battery.J");
  CHECK(error_key(std::string(kMinimal) + "[output]\nseries = maybe\n") == "output.series");
  CHECK(error_key("[protocol]\nbattery.family = FieldZ\nbattery.h = 1\ncharger.family = XYNN\nN = 6\n") ==
        "protocol.charger.gamma");
  CHECK(error_key("[protocol]\nbattery.family = FieldZ\nbattery.h = 1\ncharger.family = Heisenberg\nN = 6\n") ==
        "protocol.charger.family");
  CHECK(error_key("[protocol]\ncharger.family = IsingNN\nN = 6\n") == "protocol.battery.family");
  CHECK(error_key("[protocol]\nbattery.family = FieldZ\nbattery.h = 1\ncharger.family = IsingNN\nN = 2\n") ==
        "protocol.N");
  CHECK(error_key("preset = fig99\n") == "preset");
  CHECK(error_key(std::string(kMinimal) + "[sweep]\nvalues = 0, 0.5\n") == "sweep.parameter");
  CHECK(error_key(std::string(kMinimal) + "[sweep]\nparameter = lambda\nvalues = 0, 1.5\n") == "sweep.values");
  CHECK(error_key(std::string(kMinimal) + "[sweep]\nparameter = T\nvalues = 1\n") == "sweep.parameter");
  CHECK(error_key(std::string(kMinimal) + "[sweep]\nparameter = J\nvalues = 1, 2\n") == "sweep.parameter");
  CHECK(error_key(std::string(kMinimal) + "[sweep]\nparameter = lambda\nchargers = XYNN\nvalues = 1\n") ==
        "sweep.gamma");
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(parse_config("[protocol\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "N = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("name = \"open\n"), ConfigError);
}

TEST_CASE("sweep values accept lists and ranges") {
  const auto c = parse_config(std::string(kMinimal) + "extended_lambda = true\n[sweep]\nparameter = lambda\nrange = 0:5:0.1\n");
  REQUIRE(c.sweep);
  REQUIRE(c.sweep->values.size() == 51);
  CHECK(c.sweep->values[16] == 1.6);
  CHECK(c.sweep->values[28] == 2.8);
  CHECK(c.sweep->values.back() == 5.0);
  const auto l = parse_config(std::string(kMinimal) + "[sweep]\nparameter = N\nvalues = 4, 6,8\n");
  CHECK(l.sweep->values == std::vector<double>{4, 6, 8});
  CHECK_THROWS_AS(parse_config(std::string(kMinimal) + "[sweep]\nparameter = N\nvalues = 4\nrange = 1:2:1\n"),
                  ConfigError);
}

TEST_CASE("charger lists expand with shared gamma and J") {
  const auto c = parse_config(std::string(kMinimal) +
                              "[sweep]\nparameter = lambda\nvalues = 0, 1\nchargers = IsingNN, XYATA\ngamma = 0.5\n");
  REQUIRE(c.sweep->chargers.size() == 2);
  CHECK(c.sweep->chargers[0] == HamiltonianSpec::ising_nn(1.0));
  CHECK(c.sweep->chargers[1] == HamiltonianSpec::xy_ata(0.5, 1.0));
}

TEST_CASE("canonical serialization round-trips") {
  for (const auto& preset : figure_presets()) {
    const auto text = serialize_config(preset.config);
    CHECK(parse_config(text) == preset.config);
    CHECK(serialize_config(parse_config(text)) == text);
  }
  auto c = parse_config(kMinimal);
  c.protocol.t_on = 12.5;
  c.protocol.literal_ata_sum = true;
  c.protocol.charger = HamiltonianSpec{Family::XYATA, {}, 0.1 + 0.2, -0.3, 3};
  c.grid = {17.0, 0.01, 4};
  c.backend = PropagatorBackend::krylov(12, 1e-11);
  c.output = {"out dir", false};
  c.seed = -42;
  c.name = "custom";
  CHECK(parse_config(serialize_config(c)) == c);
}

TEST_CASE("the config hash tracks every consumed parameter") {
  const auto base = parse_config(kMinimal);
  const auto h = config_hash(base);
  CHECK(h.size() == 16);
  CHECK(config_hash(parse_config(kMinimal)) == h);
  std::set<std::string> hashes{h};
  auto variant = [&](auto mutate) {
    auto c = base;
    mutate(c);
    hashes.insert(config_hash(c));
  };
  variant([](ExperimentConfig& c) { c.protocol.lambda = 0.25; });
  variant([](ExperimentConfig& c) { c.protocol.num_qubits = 6; });
  variant([](ExperimentConfig& c) { c.protocol.t_on = 3.0; });
  variant([](ExperimentConfig& c) { c.protocol.literal_ata_sum = true; });
  variant([](ExperimentConfig& c) { c.protocol.extended_lambda = true; });
  variant([](ExperimentConfig& c) { c.protocol.battery.h = 2.0; });
  variant([](ExperimentConfig& c) { c.protocol.charger.J = 2.0; });
  variant([](ExperimentConfig& c) { c.grid.step = 0.1; });
  variant([](ExperimentConfig& c) { c.grid.refinement_factor = 2; });
  variant([](ExperimentConfig& c) { c.backend.kind = BackendKind::KrylovLanczos; });
  variant([](ExperimentConfig& c) { c.backend.tolerance = 1e-9; });
  variant([](ExperimentConfig& c) { c.seed = 1; });
  variant([](ExperimentConfig& c) { c.output.series = false; });
  variant([](ExperimentConfig& c) { c.sweep = SweepSpec{SweepParameter::Lambda, {0.0, 1.0}, {}}; });
  CHECK(hashes.size() == 15);
}

TEST_CASE("there are 21 presets in figure order") {
  const auto rows = list_presets();
  REQUIRE(rows.size() == 21);
  const char* names[] = {"fig2a", "fig2b", "fig2c1", "fig2c2", "fig2d", "fig3a", "fig3b",
                         "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d", "fig5a",
                         "fig5b", "fig6a", "fig6b", "fig6c", "fig6d", "fig7a", "fig7b"};
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].name == names[i]);
  CHECK(list_presets()[0].summary == rows[0].summary);
}

TEST_CASE("preset rows summarize their bindings") {
  const auto rows = list_presets();
  auto row = [&](const std::string& name) {
    for (const auto& r : rows) {
      if (r.name == name) return r;
    }
    FAIL("missing preset " << name);
    return rows.front();
  };
  CHECK(row("fig5a").summary.find("battery=IsingNN charger=FieldZ lambda=0 sweep=J") != std::string::npos);
  CHECK(row("fig5a").figure == "Fig. 5(a)");
  CHECK(row("fig2c1").summary.find("sweep=N{7,9,11}") != std::string::npos);
  CHECK(row("fig2c1").summary.find("odd N") != std::string::npos);
  CHECK(row("fig2c2").summary.find("sweep=N{8,10,12}") != std::string::npos);
}

TEST_CASE("preset bindings carry their documented parameters") {
  for (const auto& p : figure_presets()) {
    const auto& c = p.config;
    INFO(p.name);
    CHECK(c.grid == TimeGrid{});
    CHECK_FALSE(c.protocol.t_on);
    CHECK_NOTHROW(detail::validate_config(c));
    const auto prefix = p.name.substr(0, 4);
    if (prefix == "fig2") {
      CHECK(c.protocol.battery == HamiltonianSpec::field_z(1.0));
      CHECK(c.protocol.charger == HamiltonianSpec::ising_ata(1.0));
      if (c.sweep->parameter == SweepParameter::Lambda) CHECK(c.protocol.num_qubits == 10);
    }
    if (prefix == "fig4" || prefix == "fig6") {
      CHECK(c.protocol.num_qubits == 12);
      CHECK(c.sweep->values == std::vector<double>{0.0, 1.0});
      for (const auto* s : {&c.protocol.battery, &c.protocol.charger}) {
        if (is_xy(s->family)) CHECK(s->gamma == 0.5);
      }
    }
    if (prefix == "fig7") {
      CHECK(c.protocol.num_qubits == 10);
      CHECK(c.protocol.extended_lambda);
      CHECK(c.sweep->values.size() == 51);
      if (is_xy(c.protocol.charger.family)) CHECK(c.protocol.charger.gamma == 0.5);
    }
  }
}
