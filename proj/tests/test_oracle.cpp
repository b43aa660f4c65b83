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

#include <cmath>
#include <numbers>

#include "qbattery/oracle.hpp"

using namespace qbattery;
using Catch::Matchers::WithinAbs;

TEST_CASE("dense operators enforce the capacity gate and Hermiticity") {
  CHECK_THROWS_AS(oracle::dense_from_terms(9, {}), CapacityError);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(oracle::DenseOperator(1, m), ParameterError);
  CHECK_THROWS_AS(oracle::DenseOperator(2, Eigen::MatrixXcd::Zero(2, 2)), ParameterError);
}

TEST_CASE("Kronecker Pauli strings put qubit 1 leftmost") {
  const auto z1 = oracle::pauli_string(2, {{{1, PauliAxis::Z}}, 1.0});
  CHECK(z1(0, 0) == Complex(1.0, 0.0));
  CHECK(z1(1, 1) == Complex(1.0, 0.0));
  CHECK(z1(2, 2) == Complex(-1.0, 0.0));
  CHECK(z1(3, 3) == Complex(-1.0, 0.0));
}

TEST_CASE("oracle propagation of single-spin examples") {
  const auto up = StateVector::basis_state(1, 0);
  const auto z = oracle::dense_from_terms(1, {{{{1, PauliAxis::Z}}, 1.0}});
  CHECK(oracle::dense_expm_apply(z, up, 0.83).overlap_deficit(up) < 1e-14);
  CHECK(std::abs(oracle::dense_expm_apply(z, up, 0.83)[0] - 1.0) < 1e-14);
  const auto x = oracle::dense_from_terms(1, {{{{1, PauliAxis::X}}, 1.0}});
  const auto back = oracle::dense_expm_apply(x, up, std::numbers::pi);
  CHECK(std::abs(back[0] - 1.0) < 1e-12);
  CHECK(std::abs(back.amplitudes().norm() - 1.0) < 1e-12);
}

TEST_CASE("oracle and main propagation agree on IsingATA") {
  const auto spec = HamiltonianSpec::ising_ata(1.0);
  const auto psi = StateVector::all_down(6);
  const auto reference = oracle::dense_expm_apply(oracle::dense_from_terms(6, pauli_terms(spec, 6)), psi, 1.3);
  const auto ours = propagate(build(spec, 6), psi, 1.3, PropagatorBackend::dense());
  CHECK(std::abs(reference.overlap(ours)) >= 1.0 - 1e-8);
}

TEST_CASE("x-basis enumeration of small Ising rings") {
  const auto nn3 = oracle::xbasis_enumeration(HamiltonianSpec::ising_nn(1.0), 3).eigenvalues;
  REQUIRE(nn3.size() == 8);
  for (int i = 0; i < 6; ++i) CHECK(nn3(i) == -1.0);
  for (int i = 6; i < 8; ++i) CHECK(nn3(i) == 3.0);
  CHECK(oracle::xbasis_enumeration(HamiltonianSpec::ising_nn(1.0), 4).eigenvalues(0) == -4.0);

  // Four-site ATA: nearest bonds weigh 1 and the two antipodal pairs 1/2 each.
  const auto ata4 = oracle::xbasis_enumeration(HamiltonianSpec::ising_ata(1.0), 4).eigenvalues;
  CHECK(ata4(0) == -3.0);   // x-Neel: -4 + 1/2 + 1/2
  CHECK(ata4(15) == 5.0);   // aligned: 4 + 1/2 + 1/2
  const auto literal = oracle::xbasis_enumeration(HamiltonianSpec::ising_ata(1.0), 4, true).eigenvalues;
  CHECK(literal(15) == 6.0);
}

TEST_CASE("x-basis enumeration preconditions") {
  CHECK_THROWS_AS(oracle::xbasis_enumeration(HamiltonianSpec::xy_nn(0.5), 4), ParameterError);
  CHECK_THROWS_AS(oracle::xbasis_enumeration(HamiltonianSpec::field_z(1.0), 4), ParameterError);
  CHECK_THROWS_AS(oracle::xbasis_enumeration(HamiltonianSpec::ising_nn(1.0), 17), CapacityError);
  CHECK_NOTHROW(oracle::xbasis_enumeration(HamiltonianSpec::ising_ata(1.0), 16));
}
