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

// Dense Hermitian eigensolver backed by LAPACK's divide-and-conquer drivers,
// applied block by block over the invariant subspaces of a sparse operator.
// A one-time self-check guards against miscompiled BLAS kernels; when it
// fails, blocks are solved with Eigen instead.

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "qbattery/errors.hpp"
#include "qbattery/qubit_ops.hpp"

namespace qbattery::detail {

/// Eigenpairs of one Hermitian block, eigenvalues ascending.
struct BlockEigen {
  std::vector<SparseOperator::Index> members;  // ascending basis indices
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // members.size() x members.size(), may be empty
};

/// Connected components of the sparsity graph of `op`. Each component spans
/// an invariant subspace in the computational basis. Components are ordered
/// by their smallest member; members ascend.
inline std::vector<std::vector<SparseOperator::Index>> invariant_blocks(
    const SparseOperator& op) {
  using Index = SparseOperator::Index;
  const Index dim = op.dimension();
  std::vector<Index> parent(static_cast<std::size_t>(dim));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  const auto& m = op.matrix();
  for (Index r = 0; r < m.outerSize(); ++r) {
    for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
      Index a = find(it.row()), b = find(it.col());
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<Index> slot(static_cast<std::size_t>(dim), -1);
  std::vector<std::vector<Index>> blocks;
  for (Index i = 0; i < dim; ++i) {
    const Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[root]].push_back(i);
  }
  return blocks;
}

inline void check_info(int info, const char* routine) {
  if (info != 0) {
    throw NumericalError(std::string(routine) + " failed (info = " +
                         std::to_string(info) + ")");
  }
}

/// True when dsyevd and zheevd reproduce a known decomposition at a size
/// large enough to exercise the blocked code paths.
inline bool lapack_reliable() {
  static const bool ok = [] {
    constexpr int n = 200;
    Eigen::MatrixXcd h(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        h(i, j) = Complex{std::sin(1.0 + 0.37 * (i + j)), i == j ? 0.0 : 0.1 * std::cos(0.5 * (i - j))};
      }
      h(i, i) += 0.01 * i;
    }
    h = (0.5 * (h + h.adjoint())).eval();
    const double scale = h.norm();
    Eigen::MatrixXd r = h.real();
    Eigen::VectorXd w(n);
    Eigen::MatrixXd vr = r;
    if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, vr.data(), n, w.data()) != 0) return false;
    if ((r * vr - vr * w.asDiagonal()).norm() > 1e-10 * scale) return false;
    Eigen::MatrixXcd vc = h;
    if (LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n, vc.data(), n, w.data()) != 0) return false;
    return (h * vc - vc * w.asDiagonal()).norm() <= 1e-10 * scale;
  }();
  return ok;
}

template <class Matrix>
void eigen_fallback(Matrix& a, Eigen::VectorXd& values, bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(
      a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  values = solver.eigenvalues();
  if (want_vectors) a = solver.eigenvectors();
}

/// Dense eigendecomposition of op restricted to `members`.
inline BlockEigen eigen_block(const SparseOperator& op,
                              std::vector<SparseOperator::Index> members,
                              bool want_vectors) {
  using Index = SparseOperator::Index;
  const auto n = static_cast<Index>(members.size());
  BlockEigen out;
  out.values.resize(n);
  std::vector<Index> local(static_cast<std::size_t>(op.dimension()), -1);
  for (Index k = 0; k < n; ++k) local[members[k]] = k;

  const auto& m = op.matrix();
  const char job = want_vectors ? 'V' : 'N';
  if (op.is_real()) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      for (SparseOperator::Matrix::InnerIterator it(m, members[k]); it; ++it) {
        a(k, local[it.col()]) = it.value().real();
      }
    }
    if (lapack_reliable()) {
      check_info(LAPACKE_dsyevd(LAPACK_COL_MAJOR, job, 'L', static_cast<int>(n),
                                a.data(), static_cast<int>(n), out.values.data()),
                 "dsyevd");
    } else {
      eigen_fallback(a, out.values, want_vectors);
    }
    if (want_vectors) out.vectors = a.cast<Complex>();
  } else {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
      for (SparseOperator::Matrix::InnerIterator it(m, members[k]); it; ++it) {
        a(k, local[it.col()]) = it.value();
      }
    }
    if (lapack_reliable()) {
      check_info(LAPACKE_zheevd(LAPACK_COL_MAJOR, job, 'L', static_cast<int>(n),
                                a.data(), static_cast<int>(n), out.values.data()),
                 "zheevd");
    } else {
      eigen_fallback(a, out.values, want_vectors);
    }
    if (want_vectors) out.vectors = std::move(a);
  }
  out.members = std::move(members);
  return out;
}

}  // namespace qbattery::detail
