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

// Experiment configuration: a flat key = value document with [section]
// headers. Grammar:
//
//   document := line*
//   line     := blank | comment | "[" section "]" | key "=" value
//   comment  := ("#" | ";") text
//   value    := bare text or "double-quoted" text; lists split on ","
//
// Keys before the first section are top-level (preset, name, seed). A preset
// binding is loaded first and every other key in the document overrides it.
//
//   [protocol]  N, lambda, t_on (number | always), extended_lambda,
//               literal_ata_sum, battery.{family,h,J,gamma,K},
//               charger.{family,h,J,gamma,K}
//   [grid]      end, step, refinement
//   [backend]   kind (dense | krylov), krylov_dim, tolerance
//   [sweep]     parameter (lambda | N | J), values (list) or range
//               (start:stop:step), chargers (family list), gamma, J
//   [output]    directory, series (true | false)

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/hamiltonians.hpp"
#include "qbattery/metrics.hpp"
#include "qbattery/time_grid.hpp"

namespace qbattery {

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> values;
  /// Each entry replaces the protocol charger; empty runs the protocol
  /// charger alone.
  std::vector<HamiltonianSpec> chargers;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct OutputSpec {
  std::string directory = "results";
  bool series = true;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  std::string name = "run";
  ProtocolSpec protocol;
  TimeGrid grid;
  PropagatorBackend backend;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  std::int64_t seed = 0;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Defined in presets.hpp.
inline std::optional<ExperimentConfig> find_preset(std::string_view name);

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline std::string unquote(const std::string& key, std::string v) {
  if (!v.empty() && v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError(key, "unterminated quoted value");
    return v.substr(1, v.size() - 2);
  }
  return v;
}

inline double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  if (!std::isfinite(value)) throw ConfigError(key, "value must be finite");
  return value;
}

inline std::int64_t parse_integer(const std::string& key, const std::string& text) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return value;
}

inline int parse_int(const std::string& key, const std::string& text) {
  const auto v = parse_integer(key, text);
  if (v < -1'000'000'000 || v > 1'000'000'000) throw ConfigError(key, "integer out of range");
  return static_cast<int>(v);
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

inline Family parse_family_key(const std::string& key, const std::string& text) {
  const auto f = parse_family(text);
  if (!f) {
    throw ConfigError(key, "unknown family '" + text +
                               "' (expected FieldZ, IsingNN, IsingATA, XYNN or XYATA)");
  }
  return *f;
}

/// "start:stop:step", inclusive of stop within step * 1e-9.
inline std::vector<double> parse_range(const std::string& key, const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? a : text.find(':', a + 1);
  if (b == std::string::npos) throw ConfigError(key, "expected start:stop:step");
  const double start = parse_double(key, trim(text.substr(0, a)));
  const double stop = parse_double(key, trim(text.substr(a + 1, b - a - 1)));
  const double step = parse_double(key, trim(text.substr(b + 1)));
  if (!(step > 0.0) || stop < start) throw ConfigError(key, "range needs step > 0 and stop >= start");
  const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
  if (count > 100000) throw ConfigError(key, "range has too many points");
  std::vector<double> out;
  for (long long i = 0; i <= count; ++i) {
    // Round to 12 decimals so 0.1-steps land on their decimal values.
    out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

struct Entry {
  std::string key;  // section.name, or name at top level
  std::string value;
  int line = 0;
};

inline std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> out;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, raw)) {
    ++line;
    const auto t = trim(raw);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("", "line " + std::to_string(line) + ": malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      if (section != "protocol" && section != "grid" && section != "backend" &&
          section != "sweep" && section != "output") {
        throw ConfigError(section, "unknown section");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line) + ": expected key = value");
    }
    const auto name = trim(std::string_view(t).substr(0, eq));
    if (name.empty()) throw ConfigError("", "line " + std::to_string(line) + ": empty key");
    std::string key = section.empty() ? name : section + "." + name;
    auto value = unquote(key, trim(std::string_view(t).substr(eq + 1)));
    if (auto [it, fresh] = seen.emplace(key, line); !fresh) {
      throw ConfigError(key, "duplicate key (first on line " + std::to_string(it->second) + ")");
    }
    out.push_back({std::move(key), std::move(value), line});
  }
  return out;
}

/// Checks the model fields one key at a time so the error names the key.
inline void validate_role(const std::string& role, const HamiltonianSpec& spec, int n) {
  const std::string prefix = "protocol." + role + ".";
  const auto name = std::string(to_string(spec.family));
  if (spec.family == Family::FieldZ) {
    if (!spec.h) throw ConfigError(prefix + "h", name + " requires h");
    if (spec.J) throw ConfigError(prefix + "J", name + " does not take J");
  } else {
    if (spec.h) throw ConfigError(prefix + "h", name + " does not take h");
    if (n < kMinInteractingQubits) {
      throw ConfigError("protocol.N", name + " requires N >= 3");
    }
  }
  if (is_xy(spec.family)) {
    if (!spec.gamma) throw ConfigError(prefix + "gamma", name + " requires gamma");
    if (!(*spec.gamma >= -1.0 && *spec.gamma <= 1.0)) {
      throw ConfigError(prefix + "gamma", "gamma must lie in [-1, 1]");
    }
  } else if (spec.gamma) {
    throw ConfigError(prefix + "gamma", name + " does not take gamma");
  }
  if (spec.K) {
    if (!is_all_to_all(spec.family)) throw ConfigError(prefix + "K", name + " does not take K");
    if (*spec.K < 1 || *spec.K > n / 2) {
      throw ConfigError(prefix + "K", "K must lie in [1, " + std::to_string(n / 2) + "]");
    }
  }
  try {
    validate(spec, n);
  } catch (const ParameterError& e) {
    throw ConfigError("protocol." + role, e.what());
  }
}

inline void validate_config(const ExperimentConfig& c) {
  const auto& p = c.protocol;
  if (p.num_qubits < 1 || p.num_qubits > kMaxQubits) {
    throw ConfigError("protocol.N", "N must lie in [1, " + std::to_string(kMaxQubits) + "]");
  }
  const bool sweeps_n = c.sweep && c.sweep->parameter == SweepParameter::N;
  if (!sweeps_n) {
    validate_role("battery", p.battery, p.num_qubits);
    if (!(c.sweep && !c.sweep->chargers.empty())) validate_role("charger", p.charger, p.num_qubits);
  }
  const double max_lambda = p.extended_lambda ? kExtendedLambdaMax : kCanonicalLambdaMax;
  auto check_lambda = [&](double l, const std::string& key) {
    if (!(l >= 0.0 && l <= max_lambda)) {
      throw ConfigError(key, "lambda must lie in [0, " + std::to_string(static_cast<int>(max_lambda)) +
                                 "]" + (p.extended_lambda ? "" : " unless extended_lambda = true"));
    }
  };
  check_lambda(p.lambda, "protocol.lambda");
  if (p.t_on && !(*p.t_on > 0.0)) throw ConfigError("protocol.t_on", "t_on must be > 0 or 'always'");
  if (!(c.grid.end > 0.0)) throw ConfigError("grid.end", "end must be > 0");
  if (!(c.grid.step > 0.0 && c.grid.step <= c.grid.end)) {
    throw ConfigError("grid.step", "step must lie in (0, end]");
  }
  if (c.grid.refinement_factor < 1) throw ConfigError("grid.refinement", "refinement must be >= 1");
  if (c.backend.krylov_dim < 2) throw ConfigError("backend.krylov_dim", "krylov_dim must be >= 2");
  if (!(c.backend.tolerance > 0.0)) throw ConfigError("backend.tolerance", "tolerance must be > 0");
  if (c.output.directory.empty()) throw ConfigError("output.directory", "directory must not be empty");

  if (!c.sweep) return;
  const auto& s = *c.sweep;
  if (s.values.empty()) throw ConfigError("sweep.values", "sweep needs at least one value");
  for (double v : s.values) {
    switch (s.parameter) {
      case SweepParameter::Lambda:
        check_lambda(v, "sweep.values");
        break;
      case SweepParameter::N:
        if (v != std::floor(v) || v < 1 || v > kMaxQubits) {
          throw ConfigError("sweep.values", "N values must be integers in [1, 24]");
        }
        break;
      case SweepParameter::J:
        if (!is_interacting(p.battery.family)) {
          throw ConfigError("sweep.parameter", "a J sweep needs an interacting battery");
        }
        break;
    }
  }
  if (s.parameter == SweepParameter::N) {
    for (double v : s.values) {
      const int n = static_cast<int>(v);
      ProtocolSpec q = p;
      q.num_qubits = n;
      if (is_all_to_all(q.battery.family)) q.battery.K.reset();
      validate_role("battery", q.battery, n);
      if (s.chargers.empty()) {
        if (is_all_to_all(q.charger.family)) q.charger.K.reset();
        validate_role("charger", q.charger, n);
      }
      for (const auto& ch : s.chargers) {
        try {
          validate(ch, n);
        } catch (const ParameterError& e) {
          throw ConfigError("sweep.chargers", e.what());
        }
      }
    }
  } else {
    for (const auto& ch : s.chargers) {
      try {
        validate(ch, p.num_qubits);
      } catch (const ParameterError& e) {
        throw ConfigError("sweep.chargers", e.what());
      }
    }
  }
}

}  // namespace detail

/// Parses and validates a configuration document.
inline ExperimentConfig parse_config(std::string_view text) {
  using namespace detail;
  const auto entries = tokenize(text);

  ExperimentConfig c;
  c.protocol.battery = HamiltonianSpec::field_z(1.0);
  c.protocol.charger = HamiltonianSpec::ising_ata(1.0);
  c.protocol.num_qubits = 10;
  bool have_preset = false;
  for (const auto& e : entries) {
    if (e.key == "preset") {
      auto preset = find_preset(e.value);
      if (!preset) throw ConfigError("preset", "unknown preset '" + e.value + "'");
      c = std::move(*preset);
      have_preset = true;
    }
  }
  if (!have_preset) {
    bool battery = false, charger = false;
    for (const auto& e : entries) {
      battery = battery || e.key == "protocol.battery.family";
      charger = charger || e.key == "protocol.charger.family";
    }
    if (!battery) throw ConfigError("protocol.battery.family", "missing (or set preset)");
    if (!charger) throw ConfigError("protocol.charger.family", "missing (or set preset)");
    bool n = false;
    for (const auto& e : entries) n = n || e.key == "protocol.N";
    if (!n) throw ConfigError("protocol.N", "missing (or set preset)");
  }

  // A family key resets its role so preset fields of another family drop.
  for (const auto& e : entries) {
    for (auto* role : {"battery", "charger"}) {
      if (e.key == std::string("protocol.") + role + ".family") {
        auto& spec = std::string(role) == "battery" ? c.protocol.battery : c.protocol.charger;
        spec = HamiltonianSpec{parse_family_key(e.key, e.value), {}, {}, {}, {}};
      }
    }
  }

  std::optional<std::vector<std::string>> charger_names;
  std::optional<double> sweep_gamma, sweep_j;
  bool sweep_values = false, sweep_range = false, sweep_parameter = false;
  for (const auto& e : entries) {
    const auto& k = e.key;
    const auto& v = e.value;
    auto role_field = [&](HamiltonianSpec& spec, std::string_view field) {
      if (field == "family") return;
      if (field == "h") spec.h = parse_double(k, v);
      else if (field == "J") spec.J = parse_double(k, v);
      else if (field == "gamma") spec.gamma = parse_double(k, v);
      else if (field == "K") spec.K = parse_int(k, v);
      else throw ConfigError(k, "unknown key");
    };
    if (k == "preset") continue;
    if (k == "seed") c.seed = parse_integer(k, v);
    else if (k == "name") c.name = v;
    else if (k.starts_with("protocol.battery.")) role_field(c.protocol.battery, std::string_view(k).substr(17));
    else if (k.starts_with("protocol.charger.")) role_field(c.protocol.charger, std::string_view(k).substr(17));
    else if (k == "protocol.N") c.protocol.num_qubits = parse_int(k, v);
    else if (k == "protocol.lambda") c.protocol.lambda = parse_double(k, v);
    else if (k == "protocol.t_on") {
      if (v == "always") c.protocol.t_on.reset();
      else c.protocol.t_on = parse_double(k, v);
    } else if (k == "protocol.extended_lambda") c.protocol.extended_lambda = parse_bool(k, v);
    else if (k == "protocol.literal_ata_sum") c.protocol.literal_ata_sum = parse_bool(k, v);
    else if (k == "grid.end") c.grid.end = parse_double(k, v);
    else if (k == "grid.step") c.grid.step = parse_double(k, v);
    else if (k == "grid.refinement") c.grid.refinement_factor = parse_int(k, v);
    else if (k == "backend.kind") {
      if (v == "dense") c.backend.kind = BackendKind::DenseEigen;
      else if (v == "krylov") c.backend.kind = BackendKind::KrylovLanczos;
      else throw ConfigError(k, "expected dense or krylov, got '" + v + "'");
    } else if (k == "backend.krylov_dim") c.backend.krylov_dim = parse_int(k, v);
    else if (k == "backend.tolerance") c.backend.tolerance = parse_double(k, v);
    else if (k.starts_with("sweep.")) {
      if (!c.sweep) c.sweep.emplace();
      if (k == "sweep.parameter") {
        const auto s = parse_sweep_parameter(v);
        if (!s) throw ConfigError(k, "expected lambda, N or J, got '" + v + "'");
        c.sweep->parameter = *s;
        sweep_parameter = true;
      } else if (k == "sweep.values") {
        c.sweep->values.clear();
        for (const auto& item : split_list(v)) c.sweep->values.push_back(parse_double(k, item));
        sweep_values = true;
      } else if (k == "sweep.range") {
        c.sweep->values = parse_range(k, v);
        sweep_range = true;
      } else if (k == "sweep.chargers") {
        charger_names = split_list(v);
      } else if (k == "sweep.gamma") {
        sweep_gamma = parse_double(k, v);
      } else if (k == "sweep.J") {
        sweep_j = parse_double(k, v);
      } else {
        throw ConfigError(k, "unknown key");
      }
    } else if (k == "output.directory") c.output.directory = v;
    else if (k == "output.series") c.output.series = parse_bool(k, v);
    else throw ConfigError(k, "unknown key");
  }

  if (sweep_values && sweep_range) throw ConfigError("sweep.range", "give either values or range, not both");
  if (c.sweep && !have_preset && !sweep_parameter) throw ConfigError("sweep.parameter", "missing");
  if (charger_names) {
    c.sweep->chargers.clear();
    for (const auto& name : *charger_names) {
      HamiltonianSpec spec{parse_family_key("sweep.chargers", name), {}, {}, {}, {}};
      if (spec.family == Family::FieldZ) {
        spec.h = 1.0;
      } else {
        spec.J = sweep_j.value_or(1.0);
      }
      if (is_xy(spec.family)) {
        if (!sweep_gamma) throw ConfigError("sweep.gamma", "XY chargers require gamma");
        spec.gamma = sweep_gamma;
      }
      c.sweep->chargers.push_back(spec);
    }
  } else if (c.sweep && (sweep_gamma || sweep_j)) {
    if (c.sweep->chargers.empty()) {
      throw ConfigError(sweep_gamma ? "sweep.gamma" : "sweep.J", "only used with sweep.chargers");
    }
    for (auto& spec : c.sweep->chargers) {
      if (sweep_j && spec.family != Family::FieldZ) spec.J = sweep_j;
      if (sweep_gamma && is_xy(spec.family)) spec.gamma = sweep_gamma;
    }
  }

  detail::validate_config(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

/// Shortest decimal that parses back to the same double.
inline std::string format_exact(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace detail {

inline void serialize_role(std::ostream& out, const std::string& role, const HamiltonianSpec& s) {
  out << role << ".family = " << to_string(s.family) << '\n';
  if (s.h) out << role << ".h = " << format_exact(*s.h) << '\n';
  if (s.J) out << role << ".J = " << format_exact(*s.J) << '\n';
  if (s.gamma) out << role << ".gamma = " << format_exact(*s.gamma) << '\n';
  if (s.K) out << role << ".K = " << *s.K << '\n';
}

}  // namespace detail

/// Canonical document: every field in a fixed order, numbers in shortest
/// round-trip form. parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "name = \"" << c.name << "\"\n";
  out << "seed = " << c.seed << "\n\n[protocol]\n";
  const auto& p = c.protocol;
  out << "N = " << p.num_qubits << '\n';
  out << "lambda = " << format_exact(p.lambda) << '\n';
  out << "t_on = " << (p.t_on ? format_exact(*p.t_on) : "always") << '\n';
  out << "extended_lambda = " << (p.extended_lambda ? "true" : "false") << '\n';
  out << "literal_ata_sum = " << (p.literal_ata_sum ? "true" : "false") << '\n';
  detail::serialize_role(out, "battery", p.battery);
  detail::serialize_role(out, "charger", p.charger);
  out << "\n[grid]\nend = " << format_exact(c.grid.end) << "\nstep = " << format_exact(c.grid.step)
      << "\nrefinement = " << c.grid.refinement_factor << '\n';
  out << "\n[backend]\nkind = " << to_string(c.backend.kind) << "\nkrylov_dim = " << c.backend.krylov_dim
      << "\ntolerance = " << format_exact(c.backend.tolerance) << '\n';
  if (c.sweep) {
    const auto& s = *c.sweep;
    out << "\n[sweep]\nparameter = " << to_string(s.parameter) << "\nvalues = ";
    for (std::size_t i = 0; i < s.values.size(); ++i) out << (i ? ", " : "") << format_exact(s.values[i]);
    out << '\n';
    if (!s.chargers.empty()) {
      out << "chargers = ";
      for (std::size_t i = 0; i < s.chargers.size(); ++i) {
        out << (i ? ", " : "") << to_string(s.chargers[i].family);
      }
      out << '\n';
      for (const auto& ch : s.chargers) {
        if (ch.gamma) {
          out << "gamma = " << format_exact(*ch.gamma) << '\n';
          break;
        }
      }
      for (const auto& ch : s.chargers) {
        if (ch.J) {
          out << "J = " << format_exact(*ch.J) << '\n';
          break;
        }
      }
    }
  }
  out << "\n[output]\ndirectory = \"" << c.output.directory << "\"\nseries = "
      << (c.output.series ? "true" : "false") << '\n';
  return out.str();
}

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qbattery

#include "qbattery/presets.hpp"
