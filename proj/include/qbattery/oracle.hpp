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

// Brute-force references: dense Kronecker-product operators, propagation by
// full eigendecomposition, and classical enumeration of sigma^x-only models.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qbattery/dynamics.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/hamiltonians.hpp"

namespace qbattery::oracle {

inline constexpr int kMaxOracleQubits = 8;
inline constexpr int kMaxEnumerationQubits = 16;

/// Full 2^N x 2^N Hermitian matrix.
class DenseOperator {
 public:
  DenseOperator(int num_qubits, Eigen::MatrixXcd matrix) : n_(num_qubits), m_(std::move(matrix)) {
    if (n_ < 1 || n_ > kMaxOracleQubits) {
      throw CapacityError("oracle supports 1 <= N <= " + std::to_string(kMaxOracleQubits));
    }
    const auto dim = Eigen::Index{1} << n_;
    if (m_.rows() != dim || m_.cols() != dim) throw ParameterError("matrix size does not match N");
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
      throw ParameterError("oracle operator is not Hermitian");
    }
  }

  int num_qubits() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  int n_;
  Eigen::MatrixXcd m_;
};

inline Eigen::Matrix2cd pauli_matrix(PauliAxis axis) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd p;
  switch (axis) {
    case PauliAxis::X: p << 0, 1, 1, 0; break;
    case PauliAxis::Y: p << 0, -i, i, 0; break;
    case PauliAxis::Z: p << 1, 0, 0, -1; break;
  }
  return p;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

/// coefficient * P_1 (x) P_2 (x) ... (x) P_N with qubit 1 leftmost.
inline Eigen::MatrixXcd pauli_string(int num_qubits, const PauliTerm& term) {
  std::vector<Eigen::Matrix2cd> factors(static_cast<std::size_t>(num_qubits), Eigen::Matrix2cd::Identity());
  for (const auto& f : term.factors) {
    if (f.site < 1 || f.site > num_qubits) throw ParameterError("site out of range");
    factors[static_cast<std::size_t>(f.site - 1)] = pauli_matrix(f.axis) * factors[static_cast<std::size_t>(f.site - 1)];
  }
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return term.coefficient * out;
}

inline DenseOperator dense_from_terms(int num_qubits, const std::vector<PauliTerm>& terms) {
  if (num_qubits < 1 || num_qubits > kMaxOracleQubits) {
    throw CapacityError("oracle supports 1 <= N <= " + std::to_string(kMaxOracleQubits));
  }
  const auto dim = Eigen::Index{1} << num_qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms) m += pauli_string(num_qubits, t);
  return {num_qubits, std::move(m)};
}

/// e^{-iHt} psi by full eigendecomposition of the dense matrix.
inline StateVector dense_expm_apply(const DenseOperator& h, const StateVector& psi, double t) {
  if (psi.num_qubits() != h.num_qubits()) throw ParameterError("state and operator sizes differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix());
  if (solver.info() != Eigen::Success) throw NumericalError("oracle eigensolver failed");
  const auto& v = solver.eigenvectors();
  Eigen::VectorXcd coeff = v.adjoint() * psi.amplitudes();
  for (Eigen::Index k = 0; k < coeff.size(); ++k) {
    coeff(k) *= std::exp(Complex{0.0, -solver.eigenvalues()(k) * t});
  }
  return StateVector::normalized(v * coeff);
}

/// Spectrum of a sigma^x-only Hamiltonian from the classical energies of all
/// x-basis configurations s_i = +-1. Eigenvalues ascend.
inline SpectralData xbasis_enumeration(const HamiltonianSpec& spec, int num_qubits,
                                       bool literal_ata_sum = false) {
  if (spec.family != Family::IsingNN && spec.family != Family::IsingATA) {
    throw ParameterError("x-basis enumeration needs IsingNN or IsingATA");
  }
  if (num_qubits > kMaxEnumerationQubits) {
    throw CapacityError("x-basis enumeration supports N <= " + std::to_string(kMaxEnumerationQubits));
  }
  validate(spec, num_qubits);
  const int n = num_qubits;
  const double j = spec.J.value_or(1.0);

  // Ring distance d couples each unordered pair once. Under the literal sum
  // the antipodal distance N/2 appears twice.
  struct Bond {
    int a, b;
    double w;
  };
  std::vector<Bond> bonds;
  if (spec.family == Family::IsingNN) {
    for (int a = 0; a < n; ++a) bonds.push_back({a, (a + 1) % n, j});
  } else {
    const int range = spec.K.value_or(n % 2 == 1 ? (n - 1) / 2 : n / 2);
    for (int d = 1; d <= range; ++d) {
      const double w = j * std::pow(2.0, -(d - 1));
      for (int a = 0; a < n; ++a) {
        const int b = (a + d) % n;
        if (2 * d == n && b < a && !literal_ata_sum) continue;
        bonds.push_back({a, b, w});
      }
    }
  }

  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<double> energies(count);
  for (std::uint64_t c = 0; c < count; ++c) {
    double e = 0.0;
    for (const auto& bond : bonds) {
      const int sa = (c >> bond.a) & 1 ? -1 : 1;
      const int sb = (c >> bond.b) & 1 ? -1 : 1;
      e += bond.w * sa * sb;
    }
    energies[c] = e;
  }
  std::sort(energies.begin(), energies.end());
  SpectralData out;
  out.eigenvalues = Eigen::Map<Eigen::VectorXd>(energies.data(), static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace qbattery::oracle
