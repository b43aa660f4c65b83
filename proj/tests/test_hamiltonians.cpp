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

#include <Eigen/Dense>

#include <cmath>
#include <cstdlib>

#include "qbattery/dynamics.hpp"
#include "qbattery/hamiltonians.hpp"
#include "qbattery/oracle.hpp"

using namespace qbattery;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXcd dense(const SparseOperator& op) { return Eigen::MatrixXcd(op.matrix()); }

Eigen::VectorXd eigenvalues(const SparseOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(op));
  return es.eigenvalues();
}

/// Basis index with qubits a and b (1-based) flipped from all-up.
SparseOperator::Index pair_mask(int n, int a, int b) {
  return (SparseOperator::Index{1} << (n - a)) | (SparseOperator::Index{1} << (n - b));
}

/// Cyclic shift j -> j + 1 on basis bitstrings.
Eigen::MatrixXcd shift_operator(int n) {
  const int dim = 1 << n;
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (int c = 0; c < dim; ++c) {
    const int r = ((c >> 1) | ((c & 1) << (n - 1)));
    p(r, c) = 1.0;
  }
  return p;
}

std::vector<HamiltonianSpec> all_specs() {
  return {HamiltonianSpec::field_z(0.7), HamiltonianSpec::ising_nn(1.3), HamiltonianSpec::ising_ata(0.9),
          HamiltonianSpec::xy_nn(0.5), HamiltonianSpec::xy_ata(-0.3, 1.1)};
}

}  // namespace

TEST_CASE("FieldZ spectrum on three qubits") {
  const auto ev = eigenvalues(build(HamiltonianSpec::field_z(1.0), 3));
  const double expected[] = {-3, -1, -1, -1, 1, 1, 1, 3};
  for (int i = 0; i < 8; ++i) CHECK_THAT(ev(i), WithinAbs(expected[i], 1e-12));
}

TEST_CASE("IsingNN spectrum on three qubits matches x-basis enumeration") {
  const auto spec = HamiltonianSpec::ising_nn(1.0);
  const auto reference = oracle::xbasis_enumeration(spec, 3).eigenvalues;
  const auto ev = eigenvalues(build(spec, 3));
  CHECK((ev - reference).cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THAT(reference(0), WithinAbs(-1.0, 0));
  CHECK_THAT(reference(7), WithinAbs(3.0, 0));
}

TEST_CASE("IsingATA on four qubits counts each antipodal pair once") {
  const auto op = build(HamiltonianSpec::ising_ata(1.0), 4);
  CHECK(op.entry(pair_mask(4, 1, 3), 0) == Complex(0.5, 0.0));
  CHECK(op.entry(pair_mask(4, 2, 4), 0) == Complex(0.5, 0.0));
  CHECK(op.entry(pair_mask(4, 1, 2), 0) == Complex(1.0, 0.0));
  CHECK(op.entry(pair_mask(4, 4, 1), 0) == Complex(1.0, 0.0));
}

TEST_CASE("literal ATA sum doubles the antipodal shell") {
  const auto op = build(HamiltonianSpec::ising_ata(1.0), 4, BuildOptions{true});
  CHECK(op.entry(pair_mask(4, 1, 3), 0) == Complex(1.0, 0.0));
  CHECK(op.entry(pair_mask(4, 1, 2), 0) == Complex(1.0, 0.0));
  const auto odd = build(HamiltonianSpec::ising_ata(1.0), 5, BuildOptions{true});
  CHECK((dense(odd) - dense(build(HamiltonianSpec::ising_ata(1.0), 5))).norm() == 0.0);
}

TEST_CASE("interaction range") {
  CHECK(interaction_range(10) == 5);
  CHECK(interaction_range(9) == 4);
  CHECK(interaction_range(3) == 1);
  CHECK_THROWS_AS(interaction_range(2), ParameterError);
}

TEST_CASE("every ATA pair carries J 2^-(d-1) exactly once") {
  for (int n = 4; n <= 8; ++n) {
    for (auto spec : {HamiltonianSpec::ising_ata(1.0), HamiltonianSpec::xy_ata(0.5, 1.0)}) {
      const auto op = build(spec, n);
      const int k = interaction_range(n);
      for (int a = 1; a <= n; ++a) {
        for (int b = a + 1; b <= n; ++b) {
          const int d = std::min(b - a, n - (b - a));
          const double expected = d <= k ? std::ldexp(1.0, -(d - 1)) : 0.0;
          // <flip(a,b)|H|all up>: xx gives w(1+g) and yy gives -w(1-g), so w at g = 1/2.
          CHECK_THAT(op.entry(pair_mask(n, a, b), 0).real(), WithinAbs(expected, 1e-15));
        }
      }
    }
  }
}

TEST_CASE("families commute with the cyclic shift") {
  for (int n : {4, 5, 6}) {
    const auto p = shift_operator(n);
    for (const auto& spec : all_specs()) {
      const auto h = dense(build(spec, n));
      CHECK((p * h * p.adjoint() - h).norm() < 1e-10);
    }
  }
}

TEST_CASE("ATA with K = 1 equals NN") {
  for (int n : {4, 5, 7}) {
    auto ising = HamiltonianSpec::ising_ata(1.0);
    ising.K = 1;
    CHECK((dense(build(ising, n)) - dense(build(HamiltonianSpec::ising_nn(1.0), n))).norm() == 0.0);
    auto xy = HamiltonianSpec::xy_ata(0.5);
    xy.K = 1;
    CHECK((dense(build(xy, n)) - dense(build(HamiltonianSpec::xy_nn(0.5), n))).norm() == 0.0);
  }
}

TEST_CASE("coupled families do not commute with the field") {
  for (int n = 3; n <= 8; ++n) {
    const auto field = build(HamiltonianSpec::field_z(1.0), n);
    for (const auto& spec : all_specs()) {
      if (spec.family == Family::FieldZ) continue;
      CHECK(commutator_norm(field, build(spec, n)) > 0.0);
    }
  }
}

TEST_CASE("XY with gamma = 1 is twice Ising") {
  const auto xy = dense(build(HamiltonianSpec::xy_nn(1.0), 5));
  const auto ising = dense(build(HamiltonianSpec::ising_nn(1.0), 5));
  CHECK((xy - 2.0 * ising).norm() == 0.0);
}

TEST_CASE("Hamiltonians match Kronecker-product references") {
  for (int n : {3, 4, 5, 6}) {
    for (const auto& spec : all_specs()) {
      for (bool literal : {false, true}) {
        const auto terms = pauli_terms(spec, n, {literal});
        const auto reference = oracle::dense_from_terms(n, terms).matrix();
        CHECK((dense(build(spec, n, {literal})) - reference).norm() < 1e-13);
      }
    }
  }
}

TEST_CASE("Hamiltonian parameter validation") {
  CHECK_THROWS_AS(build(HamiltonianSpec::ising_nn(), 2), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::XYNN, {}, 1.0, {}, {}}, 4), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::FieldZ, {}, {}, {}, {}}, 4), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::IsingNN, 1.0, 1.0, {}, {}}, 4), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec::xy_nn(1.5), 4), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::IsingNN, {}, 1.0, 0.5, {}}, 4), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::IsingATA, {}, 1.0, {}, 3}, 5), ParameterError);
  CHECK_THROWS_AS(build(HamiltonianSpec{Family::IsingNN, {}, 1.0, {}, 1}, 5), ParameterError);
  CHECK_NOTHROW(build(HamiltonianSpec::field_z(1.0), 1));
}

TEST_CASE("charging generator at lambda = 0 is H_B + H_C") {
  ProtocolSpec p{HamiltonianSpec::field_z(1.0), HamiltonianSpec::ising_ata(1.0), 0.0, std::nullopt, 5};
  const auto sum = build(p.battery, 5) + build(p.charger, 5);
  CHECK((dense(protocol_hamiltonian(p, ProtocolPhase::Charging)) - dense(sum)).norm() == 0.0);
  CHECK((dense(protocol_hamiltonian(p, ProtocolPhase::BeforeCharging)) - dense(build(p.battery, 5))).norm() == 0.0);
  CHECK((dense(protocol_hamiltonian(p, ProtocolPhase::AfterCharging)) - dense(build(p.battery, 5))).norm() == 0.0);
}

TEST_CASE("charging generator at lambda = 1 is the charger alone") {
  ProtocolSpec p{HamiltonianSpec::field_z(1.0), HamiltonianSpec::xy_ata(0.5), 1.0, std::nullopt, 6};
  CHECK((dense(protocol_hamiltonian(p, ProtocolPhase::Charging)) - dense(build(p.charger, 6))).norm() == 0.0);
}

TEST_CASE("interacting battery countereffect rescales J") {
  ProtocolSpec p{HamiltonianSpec::ising_nn(1.0), HamiltonianSpec::field_z(1.0), 0.25, std::nullopt, 5};
  const auto expected = build(HamiltonianSpec::ising_nn(0.75), 5) + build(p.charger, 5);
  CHECK((dense(protocol_hamiltonian(p, ProtocolPhase::Charging)) - dense(expected)).norm() < 1e-15);
}

TEST_CASE("half countereffect with a zero charger halves the field spectrum") {
  ProtocolSpec p{HamiltonianSpec::field_z(1.0), HamiltonianSpec::field_z(0.0), 0.5, std::nullopt, 3};
  const auto ev = eigenvalues(protocol_hamiltonian(p, ProtocolPhase::Charging));
  const double expected[] = {-1.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 1.5};
  for (int i = 0; i < 8; ++i) CHECK_THAT(ev(i), WithinAbs(expected[i], 1e-12));
}

TEST_CASE("lambda range depends on extended mode") {
  ProtocolSpec p{HamiltonianSpec::field_z(1.0), HamiltonianSpec::ising_ata(1.0), 1.5, std::nullopt, 4};
  CHECK_THROWS_AS(validate(p), ParameterError);
  p.extended_lambda = true;
  CHECK_NOTHROW(validate(p));
  p.lambda = 5.5;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p.lambda = -0.1;
  CHECK_THROWS_AS(validate(p), ParameterError);
  p.lambda = 1.0;
  p.t_on = 0.0;
  CHECK_THROWS_AS(validate(p), ParameterError);
}

TEST_CASE("family names round-trip") {
  for (Family f : kAllFamilies) CHECK(parse_family(to_string(f)) == f);
  CHECK_FALSE(parse_family("Heisenberg"));
}
