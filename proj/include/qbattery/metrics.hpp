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

// Stored energy, average charging power, their maxima, and parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/hamiltonians.hpp"
#include "qbattery/time_grid.hpp"

namespace qbattery {

/// delta_e(t) = <H_B>(t) - <H_B>(0) and power(t) = delta_e(t) / t, with
/// power(0) = 0.
struct TimeSeries {
  std::vector<double> times;
  std::vector<double> delta_e;
  std::vector<double> power;
};

/// Fills `power` from `delta_e`.
inline TimeSeries power_series(TimeSeries ts) {
  if (ts.delta_e.size() != ts.times.size()) {
    throw ParameterError("time series columns have different lengths");
  }
  ts.power.resize(ts.times.size());
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    ts.power[i] = ts.times[i] > 0.0 ? ts.delta_e[i] / ts.times[i] : 0.0;
  }
  return ts;
}

enum class Quantity { Energy, Power };

struct Maximum {
  double t_star = 0.0;
  double value = 0.0;
};

/// Largest sample; ties go to the earlier time.
inline Maximum max_over_time(const TimeSeries& ts, Quantity which) {
  const auto& column = which == Quantity::Energy ? ts.delta_e : ts.power;
  if (column.empty() || column.size() != ts.times.size()) {
    throw ParameterError("max_over_time needs a nonempty, consistent series");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < column.size(); ++i) {
    if (column[i] > column[best]) best = i;
  }
  return {ts.times[best], column[best]};
}

namespace detail {

inline std::size_t argmax(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace detail

/// Series of one protocol on `grid`. After the coarse pass, the neighbourhood
/// [t_{i-1}, t_{i+1}] of the energy and power maxima is re-sampled with step
/// grid.step / grid.refinement_factor and merged into the series.
inline TimeSeries stored_energy_series(const ProtocolSpec& p, const TimeGrid& grid,
                                       const PropagatorBackend& backend = {}) {
  ProtocolEvolution evolution(p, backend);
  const double reference = evolution.battery_energy(0.0);
  std::vector<double> times = grid.times();
  std::vector<double> energy;
  energy.reserve(times.size());
  for (double t : times) energy.push_back(evolution.battery_energy(t) - reference);

  if (grid.refinement_factor > 1 && times.size() > 2) {
    const auto coarse = power_series({times, energy, {}});
    std::vector<double> extra;
    const double fine = grid.step / grid.refinement_factor;
    for (const auto* column : {&coarse.delta_e, &coarse.power}) {
      const std::size_t i = detail::argmax(*column);
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = std::min(i + 1, times.size() - 1);
      for (int k = 1;; ++k) {
        const double t = times[lo] + k * fine;
        if (t >= times[hi] - 1e-9 * fine) break;
        if (std::abs(t - times[i]) < 1e-9 * fine) continue;
        extra.push_back(t);
      }
    }
    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end(),
                            [&](double a, double b) { return std::abs(a - b) < 1e-9 * fine; }),
                extra.end());
    std::vector<std::pair<double, double>> merged;
    merged.reserve(times.size() + extra.size());
    for (std::size_t i = 0; i < times.size(); ++i) merged.emplace_back(times[i], energy[i]);
    for (double t : extra) merged.emplace_back(t, evolution.battery_energy(t) - reference);
    std::stable_sort(merged.begin(), merged.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    times.clear();
    energy.clear();
    for (const auto& [t, e] : merged) {
      times.push_back(t);
      energy.push_back(e);
    }
  }
  return power_series({std::move(times), std::move(energy), {}});
}

enum class SweepParameter { Lambda, N, J };

inline std::string_view to_string(SweepParameter s) {
  switch (s) {
    case SweepParameter::Lambda: return "lambda";
    case SweepParameter::N: return "N";
    case SweepParameter::J: return "J";
  }
  return "?";
}

inline std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  for (auto s : {SweepParameter::Lambda, SweepParameter::N, SweepParameter::J}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

struct SweepRecord {
  SweepParameter parameter = SweepParameter::Lambda;
  double value = 0.0;
  double delta_e_max = 0.0;
  double t_at_e_max = 0.0;
  double p_max = 0.0;
  double t_at_p_max = 0.0;
  /// A maximum sits on the last grid time; the window may be too short.
  bool boundary_max = false;
};

inline SweepRecord summarize(const TimeSeries& ts, SweepParameter parameter, double value) {
  const auto e = max_over_time(ts, Quantity::Energy);
  const auto p = max_over_time(ts, Quantity::Power);
  const double last = ts.times.back();
  return {parameter, value, e.value, e.t_star, p.value, p.t_star,
          e.t_star >= last || p.t_star >= last};
}

/// Least-squares line y = slope x + intercept.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Fit of P_max against log10(J).
using LogFit = LinearFit;

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("fit inputs have different lengths");
  if (x.size() < 3) throw ParameterError("a fit needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw ParameterError("fit abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double residual = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    residual += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - residual / syy, 0.0, 1.0) : 1.0;
  return fit;
}

inline LogFit log10_fit(std::span<const double> x, std::span<const double> y) {
  std::vector<double> logs;
  logs.reserve(x.size());
  for (double v : x) {
    if (!(v > 0.0)) throw ParameterError("log fit needs positive abscissae");
    logs.push_back(std::log10(v));
  }
  return linear_fit(logs, y);
}

/// Worker count: QBATTERY_WORKERS if set, otherwise the hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("QBATTERY_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on at most `workers` threads. Each
/// failure is stored at its index.
inline std::vector<std::exception_ptr> parallel_for(std::size_t count, int workers,
                                                    const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto pool_size = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < pool_size; ++w) pool.emplace_back(worker);
  }
  return errors;
}

/// Copy of `base` with the swept parameter set. ATA ranges are re-derived
/// when N changes; J applies to the battery.
inline ProtocolSpec with_parameter(ProtocolSpec base, SweepParameter parameter, double value) {
  switch (parameter) {
    case SweepParameter::Lambda:
      base.lambda = value;
      break;
    case SweepParameter::N: {
      const auto n = static_cast<int>(std::lround(value));
      if (static_cast<double>(n) != value) throw ParameterError("N must be an integer");
      base.num_qubits = n;
      if (is_all_to_all(base.battery.family)) base.battery.K.reset();
      if (is_all_to_all(base.charger.family)) base.charger.K.reset();
      break;
    }
    case SweepParameter::J:
      if (!is_interacting(base.battery.family)) {
        throw ParameterError("J sweep needs an interacting battery");
      }
      base.battery.J = value;
      break;
  }
  validate(base);
  return base;
}

/// Per-point outcome of a sweep; failed points carry their message.
struct SweepResult {
  std::vector<SweepRecord> records;   // successful points, in input order
  std::vector<TimeSeries> series;     // parallel to records
  std::vector<std::pair<double, std::string>> failures;

  bool partial() const { return !failures.empty(); }
};

inline SweepResult run_sweep(const ProtocolSpec& base, SweepParameter parameter,
                             std::span<const double> values, const TimeGrid& grid,
                             const PropagatorBackend& backend = {}, int workers = default_workers()) {
  grid.validate();
  backend.validate();
  std::vector<std::optional<TimeSeries>> series(values.size());
  auto errors = parallel_for(values.size(), workers, [&](std::size_t i) {
    series[i] = stored_energy_series(with_parameter(base, parameter, values[i]), grid, backend);
  });
  SweepResult out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (errors[i]) {
      std::string message;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
        message = "unknown error";
      }
      out.failures.emplace_back(values[i], std::move(message));
      continue;
    }
    out.records.push_back(summarize(*series[i], parameter, values[i]));
    out.series.push_back(std::move(*series[i]));
  }
  return out;
}

namespace detail {

inline std::vector<SweepRecord> records_or_throw(SweepResult r, SweepParameter parameter) {
  if (r.partial()) {
    const auto& [value, message] = r.failures.front();
    throw NumericalError(std::string(to_string(parameter)) + " = " + std::to_string(value) +
                         " failed: " + message);
  }
  return std::move(r.records);
}

}  // namespace detail

inline std::vector<SweepRecord> sweep_lambda(const ProtocolSpec& base, std::span<const double> lambdas,
                                             const TimeGrid& grid, const PropagatorBackend& backend = {}) {
  return detail::records_or_throw(run_sweep(base, SweepParameter::Lambda, lambdas, grid, backend),
                                  SweepParameter::Lambda);
}

inline std::vector<SweepRecord> sweep_size(const ProtocolSpec& base, std::span<const int> sizes,
                                           const TimeGrid& grid, const PropagatorBackend& backend = {}) {
  std::vector<double> values(sizes.begin(), sizes.end());
  for (int n : sizes) {
    if (static_cast<SparseOperator::Index>(register_dimension(n)) > kMaxDenseDimension &&
        backend.kind == BackendKind::DenseEigen) {
      throw CapacityError("N = " + std::to_string(n) + " exceeds the dense-solve bound");
    }
  }
  return detail::records_or_throw(run_sweep(base, SweepParameter::N, values, grid, backend),
                                  SweepParameter::N);
}

struct CouplingSweep {
  std::vector<SweepRecord> records;
  LogFit fit;
};

/// J sweep of an IsingNN battery under a FieldZ charger at lambda = 0, with
/// the fit of P_max against log10(J).
inline CouplingSweep sweep_coupling(const ProtocolSpec& base, std::span<const double> couplings,
                                    const TimeGrid& grid, const PropagatorBackend& backend = {}) {
  if (base.battery.family != Family::IsingNN || base.charger.family != Family::FieldZ ||
      base.lambda != 0.0) {
    throw ParameterError("coupling sweep expects an IsingNN battery, FieldZ charger, lambda = 0");
  }
  if (couplings.size() < 3) throw ParameterError("coupling sweep needs at least 3 J values");
  auto records = detail::records_or_throw(run_sweep(base, SweepParameter::J, couplings, grid, backend),
                                          SweepParameter::J);
  std::vector<double> js, pmax;
  for (const auto& r : records) {
    js.push_back(r.value);
    pmax.push_back(r.p_max);
  }
  const auto fit = log10_fit(js, pmax);
  return {std::move(records), fit};
}

struct PairingResult {
  TimeSeries without_countereffect;  // lambda = 0
  TimeSeries full_countereffect;     // lambda = 1
};

/// One battery/charger pairing at lambda = 0 and lambda = 1.
inline PairingResult run_pairing(const HamiltonianSpec& battery, const HamiltonianSpec& charger,
                                 int num_qubits, const TimeGrid& grid,
                                 const PropagatorBackend& backend = {}) {
  for (const auto* s : {&battery, &charger}) {
    if (s->family != Family::IsingNN && s->family != Family::XYNN && s->family != Family::FieldZ) {
      throw ParameterError("pairings use IsingNN, XYNN or FieldZ models");
    }
  }
  ProtocolSpec p{battery, charger, 0.0, std::nullopt, num_qubits};
  PairingResult out;
  out.without_countereffect = stored_energy_series(p, grid, backend);
  p.lambda = 1.0;
  out.full_countereffect = stored_energy_series(p, grid, backend);
  return out;
}

}  // namespace qbattery
