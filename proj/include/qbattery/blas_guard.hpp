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

// OpenBLAS picks its kernels when the library loads. On hosts where the
// autodetected kernels fail the LAPACK self-check, executables can restart
// themselves with OPENBLAS_CORETYPE pinned to a generic AVX2 or SSE core.

#include <cstdlib>

#include <unistd.h>

#include "qbattery/detail/eigensolver.hpp"

namespace qbattery {

/// Re-executes the current process with OPENBLAS_CORETYPE set when LAPACK is
/// unreliable and the variable is not already set. Returns only when no
/// restart happens.
inline void pin_blas_core_if_needed(char** argv) {
  if (detail::lapack_reliable() || std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
#if defined(__x86_64__)
  const char* core = __builtin_cpu_supports("avx2") ? "Haswell" : "Nehalem";
#else
  const char* core = "ARMV8";
#endif
  ::setenv("OPENBLAS_CORETYPE", core, 1);
  ::execv("/proc/self/exe", argv);
}

}  // namespace qbattery
