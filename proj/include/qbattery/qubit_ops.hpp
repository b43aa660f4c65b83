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

// Sparse Pauli-string operators on an N-qubit register.
//
// Basis convention: computational basis states are indexed by bitstrings,
// qubit 1 is the most significant bit, and bit value 0 is |up> (sigma^z
// eigenvalue +1). The all-down state is therefore the last basis index.

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "qbattery/errors.hpp"

namespace qbattery {

using Complex = std::complex<double>;

/// Largest register the operator layer accepts. Dense paths gate lower.
inline constexpr int kMaxQubits = 24;

enum class PauliAxis { X, Y, Z };

inline std::string_view to_string(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::X: return "X";
    case PauliAxis::Y: return "Y";
    case PauliAxis::Z: return "Z";
  }
  return "?";
}

struct PauliFactor {
  int site;  // 1-based
  PauliAxis axis;

  friend bool operator==(const PauliFactor&, const PauliFactor&) = default;
};

/// coefficient * (tensor product of factors); identity on omitted sites.
struct PauliTerm {
  std::vector<PauliFactor> factors;
  double coefficient = 1.0;
};

inline std::size_t register_dimension(int num_qubits) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ParameterError("register size must be in [1, " +
                         std::to_string(kMaxQubits) + "], got " +
                         std::to_string(num_qubits));
  }
  return std::size_t{1} << num_qubits;
}

/// Hermitian operator on the 2^N-dimensional register, stored row-major
/// compressed with entries sorted by (row, column).
class SparseOperator {
 public:
  using Index = std::int64_t;
  using Matrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, Index>;

  static constexpr double kHermitianTolerance = 1e-12;

  SparseOperator() = default;

  /// Validates shape and Hermiticity. Exact zeros are dropped.
  SparseOperator(int num_qubits, Matrix matrix)
      : num_qubits_(num_qubits), matrix_(std::move(matrix)) {
    const auto dim = static_cast<Index>(register_dimension(num_qubits));
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
      throw ParameterError("operator shape does not match register size");
    }
    matrix_.prune([](Index, Index, const Complex& v) { return v != Complex{}; });
    matrix_.makeCompressed();
    const double defect = hermiticity_defect();
    if (!(defect <= kHermitianTolerance)) {
      throw ParameterError("operator is not Hermitian (defect " +
                           std::to_string(defect) + ")");
    }
  }

  static SparseOperator zero(int num_qubits) {
    const auto dim = static_cast<Index>(register_dimension(num_qubits));
    return SparseOperator(num_qubits, Matrix(dim, dim));
  }

  int num_qubits() const noexcept { return num_qubits_; }
  Index dimension() const noexcept { return matrix_.rows(); }
  Index nonzeros() const noexcept { return matrix_.nonZeros(); }
  const Matrix& matrix() const noexcept { return matrix_; }

  Complex entry(Index row, Index col) const { return matrix_.coeff(row, col); }

  /// True when every stored entry has zero imaginary part.
  bool is_real() const {
    const Complex* values = matrix_.valuePtr();
    for (Index k = 0; k < matrix_.nonZeros(); ++k) {
      if (values[k].imag() != 0.0) return false;
    }
    return true;
  }

  /// max |A(r,c) - conj(A(c,r))| over stored entries.
  double hermiticity_defect() const {
    double worst = 0.0;
    for (Index r = 0; r < matrix_.outerSize(); ++r) {
      for (Matrix::InnerIterator it(matrix_, r); it; ++it) {
        const Complex mirrored = matrix_.coeff(it.col(), it.row());
        worst = std::max(worst, std::abs(it.value() - std::conj(mirrored)));
      }
    }
    return worst;
  }

  double frobenius_norm() const { return matrix_.norm(); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const {
    if (v.size() != dimension()) {
      throw ParameterError("vector length does not match operator dimension");
    }
    return matrix_ * v;
  }

  SparseOperator scaled(double factor) const {
    Matrix m = matrix_ * Complex(factor, 0.0);
    return SparseOperator(num_qubits_, std::move(m));
  }

  friend SparseOperator operator+(const SparseOperator& a,
                                  const SparseOperator& b) {
    if (a.num_qubits_ != b.num_qubits_) {
      throw ParameterError("operator register sizes differ");
    }
    Matrix m = a.matrix_ + b.matrix_;
    return SparseOperator(a.num_qubits_, std::move(m));
  }

  friend SparseOperator operator-(const SparseOperator& a,
                                  const SparseOperator& b) {
    return a + b.scaled(-1.0);
  }

 private:
  int num_qubits_ = 0;
  Matrix matrix_;
};

namespace detail {

inline void validate_term(const PauliTerm& term, int num_qubits) {
  if (!std::isfinite(term.coefficient)) {
    throw ParameterError("Pauli term coefficient must be finite");
  }
  for (std::size_t a = 0; a < term.factors.size(); ++a) {
    const int site = term.factors[a].site;
    if (site < 1 || site > num_qubits) {
      throw ParameterError("site " + std::to_string(site) +
                           " outside register [1, " +
                           std::to_string(num_qubits) + "]");
    }
    for (std::size_t b = 0; b < a; ++b) {
      if (term.factors[b].site == site) {
        throw ParameterError("site " + std::to_string(site) +
                             " repeated within one Pauli term");
      }
    }
  }
}

}  // namespace detail

/// Sum of weighted Pauli strings as a sparse operator. An empty list yields
/// the zero operator.
inline SparseOperator assemble(const std::vector<PauliTerm>& terms,
                               int num_qubits) {
  using Index = SparseOperator::Index;
  const auto dim = static_cast<Index>(register_dimension(num_qubits));
  for (const auto& term : terms) detail::validate_term(term, num_qubits);

  std::vector<Eigen::Triplet<Complex, Index>> triplets;
  triplets.reserve(terms.size() * static_cast<std::size_t>(dim));
  for (const auto& term : terms) {
    Index flip_mask = 0;
    for (const auto& f : term.factors) {
      if (f.axis != PauliAxis::Z) flip_mask |= Index{1} << (num_qubits - f.site);
    }
    for (Index col = 0; col < dim; ++col) {
      Complex phase{term.coefficient, 0.0};
      for (const auto& f : term.factors) {
        const bool down = (col >> (num_qubits - f.site)) & 1;
        switch (f.axis) {
          case PauliAxis::X: break;
          case PauliAxis::Y: phase *= down ? Complex{0, -1} : Complex{0, 1}; break;
          case PauliAxis::Z: if (down) phase = -phase; break;
        }
      }
      triplets.emplace_back(col ^ flip_mask, col, phase);
    }
  }
  SparseOperator::Matrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(num_qubits, std::move(m));
}

/// sigma^axis on `site`, identity elsewhere.
inline SparseOperator pauli_site(int num_qubits, int site, PauliAxis axis) {
  return assemble({PauliTerm{{{site, axis}}, 1.0}}, num_qubits);
}

/// Frobenius norm of AB - BA.
inline double commutator_norm(const SparseOperator& a, const SparseOperator& b) {
  if (a.dimension() != b.dimension()) {
    throw ParameterError("commutator of operators with different dimensions");
  }
  const SparseOperator::Matrix ab = a.matrix() * b.matrix();
  const SparseOperator::Matrix ba = b.matrix() * a.matrix();
  return SparseOperator::Matrix(ab - ba).norm();
}

/// One line per stored entry, `row col re im`, sorted by (row, col).
inline void dump_text(const SparseOperator& op, std::ostream& out) {
  char line[96];
  const auto& m = op.matrix();
  for (SparseOperator::Index r = 0; r < m.outerSize(); ++r) {
    for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
      std::snprintf(line, sizeof line, "%lld %lld %.17g %.17g\n",
                    static_cast<long long>(it.row()),
                    static_cast<long long>(it.col()), it.value().real(),
                    it.value().imag());
      out << line;
    }
  }
}

}  // namespace qbattery
