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

#include <cmath>
#include <vector>

#include "qbattery/errors.hpp"

namespace qbattery {

/// Uniform sampling of [0, end]. Maxima are re-sampled `refinement_factor`
/// times finer between their neighbouring grid points.
struct TimeGrid {
  double end = 100.0;
  double step = 0.05;
  int refinement_factor = 10;

  void validate() const {
    if (!(end > 0.0 && std::isfinite(end))) throw ParameterError("grid end must be > 0");
    if (!(step > 0.0 && step <= end)) throw ParameterError("grid step must be in (0, end]");
    if (refinement_factor < 1) throw ParameterError("refinement factor must be >= 1");
  }

  /// t_i = i * step, closing with `end` when it is not a multiple of step.
  std::vector<double> times() const {
    validate();
    const auto count = static_cast<long long>(std::floor(end / step + 1e-9));
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(count) + 2);
    for (long long i = 0; i <= count; ++i) t.push_back(static_cast<double>(i) * step);
    if (t.back() < end - 1e-9 * step) t.push_back(end);
    return t;
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

}  // namespace qbattery
