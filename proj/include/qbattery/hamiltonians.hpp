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

// Spin-chain model families on a periodic ring and the piecewise charging
// protocol built from them.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbattery/errors.hpp"
#include "qbattery/qubit_ops.hpp"

namespace qbattery {

enum class Family { FieldZ, IsingNN, IsingATA, XYNN, XYATA };

inline constexpr Family kAllFamilies[] = {Family::FieldZ, Family::IsingNN,
                                          Family::IsingATA, Family::XYNN,
                                          Family::XYATA};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::FieldZ: return "FieldZ";
    case Family::IsingNN: return "IsingNN";
    case Family::IsingATA: return "IsingATA";
    case Family::XYNN: return "XYNN";
    case Family::XYATA: return "XYATA";
  }
  return "?";
}

inline std::optional<Family> parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

constexpr bool is_interacting(Family f) { return f != Family::FieldZ; }
constexpr bool is_xy(Family f) { return f == Family::XYNN || f == Family::XYATA; }
constexpr bool is_all_to_all(Family f) {
  return f == Family::IsingATA || f == Family::XYATA;
}

/// Smallest register accepted for interacting families. At N = 2 the ring
/// sum visits the single bond twice.
inline constexpr int kMinInteractingQubits = 3;

/// Default ATA truncation: every unordered pair within ring distance K
/// appears once.
inline int interaction_range(int num_qubits) {
  if (num_qubits < kMinInteractingQubits) {
    throw ParameterError("interaction range needs N >= 3, got " +
                         std::to_string(num_qubits));
  }
  return num_qubits % 2 == 1 ? (num_qubits - 1) / 2 : num_qubits / 2;
}

/// Model family plus its parameters. Unused fields stay empty: gamma only
/// for XY families, K only for ATA families (derived from N when absent).
/// J defaults to 1 for interacting families.
struct HamiltonianSpec {
  Family family = Family::FieldZ;
  std::optional<double> h;
  std::optional<double> J;
  std::optional<double> gamma;
  std::optional<int> K;

  static HamiltonianSpec field_z(double h) { return {Family::FieldZ, h, {}, {}, {}}; }
  static HamiltonianSpec ising_nn(double J = 1.0) { return {Family::IsingNN, {}, J, {}, {}}; }
  static HamiltonianSpec ising_ata(double J = 1.0) { return {Family::IsingATA, {}, J, {}, {}}; }
  static HamiltonianSpec xy_nn(double gamma, double J = 1.0) {
    return {Family::XYNN, {}, J, gamma, {}};
  }
  static HamiltonianSpec xy_ata(double gamma, double J = 1.0) {
    return {Family::XYATA, {}, J, gamma, {}};
  }

  friend bool operator==(const HamiltonianSpec&, const HamiltonianSpec&) = default;
};

/// Options that change which operator a spec denotes.
struct BuildOptions {
  /// Sum the antipodal shell (even N, k = N/2) over all N sites, counting
  /// each antipodal pair twice.
  bool literal_ata_sum = false;
};

inline void validate(const HamiltonianSpec& spec, int num_qubits) {
  const std::string name(to_string(spec.family));
  register_dimension(num_qubits);
  if (spec.family == Family::FieldZ) {
    if (!spec.h) throw ParameterError(name + " requires field strength h");
    if (!std::isfinite(*spec.h)) throw ParameterError("h must be finite");
    if (spec.J) throw ParameterError(name + " does not take J");
  } else {
    if (spec.h) throw ParameterError(name + " does not take h");
    if (num_qubits < kMinInteractingQubits) {
      throw ParameterError(name + " requires N >= 3, got " +
                           std::to_string(num_qubits));
    }
    if (spec.J && !std::isfinite(*spec.J)) throw ParameterError("J must be finite");
  }
  if (is_xy(spec.family)) {
    if (!spec.gamma) throw ParameterError(name + " requires anisotropy gamma");
    if (!(*spec.gamma >= -1.0 && *spec.gamma <= 1.0)) {
      throw ParameterError("gamma must lie in [-1, 1]");
    }
  } else if (spec.gamma) {
    throw ParameterError(name + " does not take gamma");
  }
  if (is_all_to_all(spec.family)) {
    if (spec.K) {
      const int max_range = num_qubits / 2;
      if (*spec.K < 1 || *spec.K > max_range) {
        throw ParameterError("K must lie in [1, " + std::to_string(max_range) +
                             "] for N = " + std::to_string(num_qubits));
      }
    }
  } else if (spec.K) {
    throw ParameterError(name + " does not take K");
  }
}

/// Effective ATA range of a validated spec (1 for NN families).
inline int effective_range(const HamiltonianSpec& spec, int num_qubits) {
  if (!is_all_to_all(spec.family)) return 1;
  return spec.K ? *spec.K : interaction_range(num_qubits);
}

/// The Pauli-string expansion of a spec, in a fixed order: for FieldZ one
/// sigma^z per site; otherwise shells k = 1..K, sites j = 1..N, xx before yy.
inline std::vector<PauliTerm> pauli_terms(const HamiltonianSpec& spec,
                                          int num_qubits,
                                          const BuildOptions& options = {}) {
  validate(spec, num_qubits);
  std::vector<PauliTerm> terms;
  const int n = num_qubits;
  if (spec.family == Family::FieldZ) {
    for (int j = 1; j <= n; ++j) terms.push_back({{{j, PauliAxis::Z}}, *spec.h});
    return terms;
  }
  const double coupling = spec.J.value_or(1.0);
  const double gamma = spec.gamma.value_or(0.0);
  const double xx_scale = is_xy(spec.family) ? 1.0 + gamma : 1.0;
  const double yy_scale = is_xy(spec.family) ? 1.0 - gamma : 0.0;
  const int range = effective_range(spec, n);
  for (int k = 1; k <= range; ++k) {
    const double weight = coupling * std::ldexp(1.0, -(k - 1));
    // The antipodal shell of an even ring pairs j with j + N/2 and
    // j + N/2 with j; keep only the first half unless asked not to.
    const bool antipodal = (2 * k == n);
    const int last_site = (antipodal && !options.literal_ata_sum) ? n / 2 : n;
    for (int j = 1; j <= last_site; ++j) {
      const int partner = (j - 1 + k) % n + 1;
      if (xx_scale != 0.0) {
        terms.push_back({{{j, PauliAxis::X}, {partner, PauliAxis::X}}, weight * xx_scale});
      }
      if (yy_scale != 0.0) {
        terms.push_back({{{j, PauliAxis::Y}, {partner, PauliAxis::Y}}, weight * yy_scale});
      }
    }
  }
  return terms;
}

inline SparseOperator build(const HamiltonianSpec& spec, int num_qubits,
                            const BuildOptions& options = {}) {
  return assemble(pauli_terms(spec, num_qubits, options), num_qubits);
}

enum class ProtocolPhase { BeforeCharging, Charging, AfterCharging };

/// Largest countereffect accepted in canonical and extended mode.
inline constexpr double kCanonicalLambdaMax = 1.0;
inline constexpr double kExtendedLambdaMax = 5.0;

/// The charging pulse: H_B before t = 0, (1 - lambda) H_B + H_C on
/// [0, t_on], H_B afterwards. An empty t_on keeps the charger on.
struct ProtocolSpec {
  HamiltonianSpec battery;
  HamiltonianSpec charger;
  double lambda = 0.0;
  std::optional<double> t_on;
  int num_qubits = 0;
  bool extended_lambda = false;
  bool literal_ata_sum = false;

  BuildOptions build_options() const { return {literal_ata_sum}; }

  friend bool operator==(const ProtocolSpec&, const ProtocolSpec&) = default;
};

inline void validate(const ProtocolSpec& p) {
  validate(p.battery, p.num_qubits);
  validate(p.charger, p.num_qubits);
  const double max_lambda = p.extended_lambda ? kExtendedLambdaMax : kCanonicalLambdaMax;
  if (!(p.lambda >= 0.0 && p.lambda <= max_lambda)) {
    throw ParameterError("lambda = " + std::to_string(p.lambda) +
                         " outside [0, " + std::to_string(max_lambda) + "]" +
                         (p.extended_lambda ? "" : " (extended mode disabled)"));
  }
  if (p.t_on && !(*p.t_on > 0.0 && std::isfinite(*p.t_on))) {
    throw ParameterError("t_on must be positive and finite");
  }
}

/// Generator of the given protocol phase. During charging the battery
/// terms are rescaled by (1 - lambda), which for interacting batteries is
/// exactly J -> (1 - lambda) J.
inline SparseOperator protocol_hamiltonian(const ProtocolSpec& p,
                                           ProtocolPhase phase) {
  validate(p);
  const auto options = p.build_options();
  std::vector<PauliTerm> terms = pauli_terms(p.battery, p.num_qubits, options);
  if (phase != ProtocolPhase::Charging) return assemble(terms, p.num_qubits);

  const double keep = 1.0 - p.lambda;
  for (auto& t : terms) t.coefficient *= keep;
  std::erase_if(terms, [](const PauliTerm& t) { return t.coefficient == 0.0; });
  auto charger = pauli_terms(p.charger, p.num_qubits, options);
  terms.insert(terms.end(), charger.begin(), charger.end());
  return assemble(terms, p.num_qubits);
}

}  // namespace qbattery
