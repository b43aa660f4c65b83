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

// Pure-state dynamics: ground states, spectra, and e^{-iHt} psi through
// either a dense eigendecomposition or an adaptive Lanczos propagator.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qbattery/detail/eigensolver.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/hamiltonians.hpp"
#include "qbattery/qubit_ops.hpp"
#include "qbattery/time_grid.hpp"

namespace qbattery {

/// Amplitudes below this magnitude never fix the global phase.
inline constexpr double kPhaseCutoff = 1e-10;
inline constexpr double kNormTolerance = 1e-10;
/// Eigenvalues closer than this belong to one degenerate level.
inline constexpr double kDegeneracyTolerance = 1e-9;
/// Largest dimension handed to the dense eigensolver.
inline constexpr SparseOperator::Index kMaxDenseDimension = SparseOperator::Index{1} << 13;

/// Normalized pure state in canonical phase: the first amplitude with
/// magnitude above kPhaseCutoff is real and positive.
class StateVector {
 public:
  StateVector() = default;

  /// Requires unit norm within kNormTolerance.
  explicit StateVector(Eigen::VectorXcd amplitudes)
      : amplitudes_(std::move(amplitudes)) {
    check_register();
    const double norm = amplitudes_.norm();
    if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
      throw ParameterError("state is not normalized (norm " + std::to_string(norm) + ")");
    }
    canonicalize();
  }

  /// Rescales to unit norm first; the zero vector is rejected.
  static StateVector normalized(Eigen::VectorXcd amplitudes) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw NumericalError("cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return StateVector(std::move(amplitudes));
  }

  static StateVector basis_state(int num_qubits, SparseOperator::Index index) {
    const auto dim = static_cast<SparseOperator::Index>(register_dimension(num_qubits));
    if (index < 0 || index >= dim) throw ParameterError("basis index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
  }

  /// |down ... down>, the last basis index.
  static StateVector all_down(int num_qubits) {
    return basis_state(num_qubits, static_cast<SparseOperator::Index>(
                                       register_dimension(num_qubits)) - 1);
  }

  int num_qubits() const noexcept { return num_qubits_; }
  SparseOperator::Index dimension() const noexcept { return amplitudes_.size(); }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](SparseOperator::Index i) const { return amplitudes_(i); }

  Complex overlap(const StateVector& other) const {
    if (other.dimension() != dimension()) throw ParameterError("state dimensions differ");
    return amplitudes_.dot(other.amplitudes_);
  }

  /// 1 - |<this|other>|, zero for equal rays.
  double overlap_deficit(const StateVector& other) const {
    return 1.0 - std::abs(overlap(other));
  }

 private:
  void check_register() {
    const auto dim = amplitudes_.size();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
      throw ParameterError("state length must be a power of two >= 2");
    }
    num_qubits_ = 0;
    while ((SparseOperator::Index{1} << num_qubits_) < dim) ++num_qubits_;
  }

  void canonicalize() {
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
      const double mag = std::abs(amplitudes_(i));
      if (mag > kPhaseCutoff) {
        amplitudes_ *= std::conj(amplitudes_(i)) / mag;
        amplitudes_(i) = mag;
        return;
      }
    }
  }

  int num_qubits_ = 0;
  Eigen::VectorXcd amplitudes_;
};

enum class BackendKind { DenseEigen, KrylovLanczos };

inline std::string_view to_string(BackendKind k) {
  return k == BackendKind::DenseEigen ? "dense" : "krylov";
}

struct PropagatorBackend {
  BackendKind kind = BackendKind::DenseEigen;
  int krylov_dim = 30;
  double tolerance = 1e-10;

  static PropagatorBackend dense() { return {}; }
  static PropagatorBackend krylov(int dim = 30, double tol = 1e-10) {
    return {BackendKind::KrylovLanczos, dim, tol};
  }

  void validate() const {
    if (krylov_dim < 2) throw ParameterError("krylov_dim must be >= 2");
    if (!(tolerance > 0.0)) throw ParameterError("tolerance must be > 0");
  }

  friend bool operator==(const PropagatorBackend&, const PropagatorBackend&) = default;
};

struct SpectralData {
  Eigen::VectorXd eigenvalues;                  // ascending
  std::optional<Eigen::MatrixXcd> eigenvectors;  // columns match eigenvalues
};

inline void require_dense_capacity(const SparseOperator& h) {
  if (h.dimension() > kMaxDenseDimension) {
    throw CapacityError("dimension " + std::to_string(h.dimension()) +
                        " exceeds the dense eigensolver bound " +
                        std::to_string(kMaxDenseDimension) +
                        "; use Krylov propagation, which needs no full spectrum");
  }
}

/// Full ascending spectrum, computed block by block over the invariant
/// subspaces of H.
inline SpectralData spectrum(const SparseOperator& h, bool want_vectors) {
  using Index = SparseOperator::Index;
  require_dense_capacity(h);
  const Index dim = h.dimension();
  std::vector<double> values;
  std::vector<std::pair<std::size_t, Index>> origin;  // (block, column)
  std::vector<detail::BlockEigen> blocks;
  for (auto& members : detail::invariant_blocks(h)) {
    blocks.push_back(detail::eigen_block(h, std::move(members), want_vectors));
    const auto& b = blocks.back();
    for (Index k = 0; k < b.values.size(); ++k) {
      values.push_back(b.values(k));
      origin.emplace_back(blocks.size() - 1, k);
    }
  }
  std::vector<Index> order(values.size());
  for (Index i = 0; i < dim; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });

  SpectralData out;
  out.eigenvalues.resize(dim);
  if (want_vectors) out.eigenvectors = Eigen::MatrixXcd::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    out.eigenvalues(i) = values[order[i]];
    if (want_vectors) {
      const auto [bi, col] = origin[order[i]];
      const auto& b = blocks[bi];
      for (std::size_t r = 0; r < b.members.size(); ++r) {
        (*out.eigenvectors)(b.members[r], i) = b.vectors(static_cast<Index>(r), col);
      }
    }
  }
  return out;
}

/// Sizes of clusters of (sorted) eigenvalues within `tolerance`.
inline std::vector<std::pair<double, int>> degeneracies(
    const Eigen::VectorXd& sorted_values, double tolerance = kDegeneracyTolerance) {
  std::vector<std::pair<double, int>> levels;
  for (Eigen::Index i = 0; i < sorted_values.size(); ++i) {
    if (!levels.empty() &&
        sorted_values(i) - levels.back().first <= tolerance) {
      ++levels.back().second;
    } else {
      levels.emplace_back(sorted_values(i), 1);
    }
  }
  return levels;
}

struct GroundState {
  double energy = 0.0;
  StateVector state;
  int degeneracy = 1;
};

/// Lowest eigenvalue and a deterministic ground vector. Within a degenerate
/// ground space G the selected vector is P_G e_i / |P_G e_i| for the basis
/// index i with the largest |P_G e_i| (smallest i on ties), i.e. the unit
/// vector in G with the largest single amplitude. The choice does not depend
/// on which basis of G the eigensolver returns.
inline GroundState ground_state(const SparseOperator& h) {
  using Index = SparseOperator::Index;
  require_dense_capacity(h);
  const Index dim = h.dimension();
  std::vector<detail::BlockEigen> blocks;
  double lowest = std::numeric_limits<double>::infinity();
  for (auto& members : detail::invariant_blocks(h)) {
    blocks.push_back(detail::eigen_block(h, std::move(members), true));
    lowest = std::min(lowest, blocks.back().values(0));
  }
  if (!std::isfinite(lowest)) throw NumericalError("eigensolver returned no finite eigenvalue");

  std::vector<Eigen::VectorXcd> basis;
  for (const auto& b : blocks) {
    for (Index k = 0; k < b.values.size() && b.values(k) <= lowest + kDegeneracyTolerance; ++k) {
      Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
      for (std::size_t r = 0; r < b.members.size(); ++r) {
        v(b.members[r]) = b.vectors(static_cast<Index>(r), k);
      }
      basis.push_back(std::move(v));
    }
  }
  Eigen::MatrixXcd q(dim, static_cast<Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) q.col(static_cast<Index>(c)) = basis[c];

  const Eigen::VectorXd weight = q.rowwise().squaredNorm();
  const double best = weight.maxCoeff();
  Index pick = 0;
  while (weight(pick) < best * (1.0 - 1e-9)) ++pick;
  Eigen::VectorXcd selected = q * q.row(pick).adjoint();
  return {lowest, StateVector::normalized(std::move(selected)),
          static_cast<int>(basis.size())};
}

/// <psi|H|psi>; the imaginary residue must be below 1e-10.
inline double expectation(const SparseOperator& h, const StateVector& psi) {
  if (h.dimension() != psi.dimension()) {
    throw ParameterError("operator and state dimensions differ");
  }
  const Complex value = psi.amplitudes().dot(h.matrix() * psi.amplitudes());
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real()))) {
    throw NumericalError("expectation value has imaginary part " +
                         std::to_string(value.imag()));
  }
  return value.real();
}

/// Exact evolution of one initial state under a fixed H. The state is split
/// into its projections onto the distinct eigenvalues of H, after which any
/// time is sampled without further diagonalization.
class SpectralPropagator {
 public:
  SpectralPropagator(const SparseOperator& h, const StateVector& initial) {
    using Index = SparseOperator::Index;
    require_dense_capacity(h);
    if (h.dimension() != initial.dimension()) {
      throw ParameterError("operator and state dimensions differ");
    }
    const Index dim = h.dimension();
    const auto& psi = initial.amplitudes();
    std::vector<double> energies;
    std::vector<Eigen::VectorXcd> parts;
    for (auto& members : detail::invariant_blocks(h)) {
      Eigen::VectorXcd local(static_cast<Index>(members.size()));
      for (std::size_t r = 0; r < members.size(); ++r) local(static_cast<Index>(r)) = psi(members[r]);
      if (local.squaredNorm() == 0.0) continue;
      const auto block = detail::eigen_block(h, std::move(members), true);
      const Eigen::VectorXcd coeff = block.vectors.adjoint() * local;
      const double scale = std::max(1.0, block.values.cwiseAbs().maxCoeff());
      Index start = 0;
      const Index n = block.values.size();
      while (start < n) {
        Index stop = start + 1;
        while (stop < n && block.values(stop) - block.values(stop - 1) <= 1e-12 * scale) ++stop;
        const Index width = stop - start;
        Eigen::VectorXcd part = block.vectors.middleCols(start, width) * coeff.segment(start, width);
        if (part.norm() > 1e-15) {
          Eigen::VectorXcd full = Eigen::VectorXcd::Zero(dim);
          for (std::size_t r = 0; r < block.members.size(); ++r) {
            full(block.members[r]) = part(static_cast<Index>(r));
          }
          energies.push_back(block.values.segment(start, width).mean());
          parts.push_back(std::move(full));
        }
        start = stop;
      }
    }
    energies_ = Eigen::Map<Eigen::VectorXd>(energies.data(), static_cast<Index>(energies.size()));
    components_.resize(dim, static_cast<Index>(parts.size()));
    for (std::size_t c = 0; c < parts.size(); ++c) components_.col(static_cast<Index>(c)) = parts[c];
  }

  /// Number of distinct eigenvalues the initial state touches.
  Eigen::Index num_components() const noexcept { return energies_.size(); }

  StateVector state_at(double t) const {
    return StateVector::normalized(components_ * phases(t));
  }

  /// <psi(t)|A|psi(t)> sampled through the Gram matrix of A in the
  /// component basis.
  class Observable {
   public:
    double value(double t) const {
      const Eigen::VectorXcd a = owner_->phases(t);
      return a.dot(gram_ * a).real();
    }

   private:
    friend class SpectralPropagator;
    Observable(const SpectralPropagator* owner, Eigen::MatrixXcd gram)
        : owner_(owner), gram_(std::move(gram)) {}
    const SpectralPropagator* owner_;
    Eigen::MatrixXcd gram_;
  };

  Observable observe(const SparseOperator& a) const {
    if (a.dimension() != components_.rows()) throw ParameterError("observable dimension differs");
    const Eigen::MatrixXcd image = a.matrix() * components_;
    return Observable(this, components_.adjoint() * image);
  }

 private:
  Eigen::VectorXcd phases(double t) const {
    return (energies_ * Complex(0.0, -t)).array().exp().matrix();
  }

  Eigen::VectorXd energies_;
  Eigen::MatrixXcd components_;
};

namespace detail {

/// One Lanczos step sequence from `start`, with full reorthogonalization.
struct LanczosBasis {
  Eigen::MatrixXcd vectors;  // dim x m
  Eigen::VectorXd alpha;     // m
  Eigen::VectorXd beta;      // m; beta(m-1) is the residual norm
  bool invariant = false;    // residual vanished: the subspace is exact
};

inline LanczosBasis lanczos(const SparseOperator& h, const Eigen::VectorXcd& start, int max_dim) {
  const Eigen::Index dim = start.size();
  const Eigen::Index m_max = std::min<Eigen::Index>(max_dim, dim);
  LanczosBasis out;
  out.vectors.resize(dim, m_max);
  out.alpha.resize(m_max);
  out.beta.resize(m_max);
  out.vectors.col(0) = start;
  Eigen::Index m = 0;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < m_max; ++j) {
    Eigen::VectorXcd w = h.matrix() * out.vectors.col(j);
    out.alpha(j) = out.vectors.col(j).dot(w).real();
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXcd proj = out.vectors.leftCols(j + 1).adjoint() * w;
      w -= out.vectors.leftCols(j + 1) * proj;
    }
    out.beta(j) = w.norm();
    scale = std::max({scale, std::abs(out.alpha(j)), out.beta(j)});
    m = j + 1;
    if (out.beta(j) <= 1e-13 * std::max(1.0, scale)) {
      out.invariant = true;
      break;
    }
    if (j + 1 < m_max) out.vectors.col(j + 1) = w / out.beta(j);
  }
  if (m == dim) out.invariant = true;
  out.vectors.conservativeResize(dim, m);
  out.alpha.conservativeResize(m);
  out.beta.conservativeResize(m);
  return out;
}

}  // namespace detail

/// e^{-iHt} psi by restarted Lanczos. Each substep is accepted when the
/// residual estimate beta_m |[e^{-iT tau}]_{m,1}| is within `tolerance`,
/// halving the substep otherwise.
inline StateVector krylov_propagate(const SparseOperator& h, const StateVector& psi,
                                    double t, int krylov_dim, double tolerance) {
  if (h.dimension() != psi.dimension()) throw ParameterError("operator and state dimensions differ");
  if (!std::isfinite(t)) throw ParameterError("propagation time must be finite");
  PropagatorBackend{BackendKind::KrylovLanczos, krylov_dim, tolerance}.validate();
  Eigen::VectorXcd v = psi.amplitudes();
  const double direction = t < 0 ? -1.0 : 1.0;
  double remaining = std::abs(t);
  double tau = remaining;
  const double floor = 1e-12 * std::max(1.0, remaining);
  while (remaining > 1e-15 * std::max(1.0, std::abs(t))) {
    const auto basis = detail::lanczos(h, v, krylov_dim);
    const Eigen::Index m = basis.alpha.size();
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      tri(i, i) = basis.alpha(i);
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = basis.beta(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
    const Eigen::VectorXcd first_row = eig.eigenvectors().row(0).transpose().cast<Complex>();
    tau = std::min(tau, remaining);
    Eigen::VectorXcd y;
    while (true) {
      const Eigen::VectorXcd ph =
          (eig.eigenvalues().cast<Complex>() * Complex(0.0, -direction * tau)).array().exp().matrix();
      y = eig.eigenvectors().cast<Complex>() * ph.cwiseProduct(first_row);
      const double error = basis.invariant ? 0.0 : basis.beta(m - 1) * std::abs(y(m - 1));
      if (error <= tolerance) break;
      tau *= 0.5;
      if (tau < floor) {
        throw NumericalError("Krylov step failed to reach tolerance " + std::to_string(tolerance) +
                             " (residual " + std::to_string(error) +
                             "); retry with a larger krylov_dim");
      }
    }
    v = basis.vectors * y;
    v /= v.norm();
    remaining -= tau;
    tau *= 2.0;
  }
  return StateVector::normalized(std::move(v));
}

/// e^{-iHt} psi with the chosen backend.
inline StateVector propagate(const SparseOperator& h, const StateVector& psi, double t,
                             const PropagatorBackend& backend = {}) {
  backend.validate();
  if (!std::isfinite(t)) throw ParameterError("propagation time must be finite");
  if (backend.kind == BackendKind::KrylovLanczos) {
    return krylov_propagate(h, psi, t, backend.krylov_dim, backend.tolerance);
  }
  return SpectralPropagator(h, psi).state_at(t);
}

/// The battery-energy trajectory of one protocol, starting from the
/// battery ground state. Times may be requested in any order.
class ProtocolEvolution {
 public:
  ProtocolEvolution(const ProtocolSpec& p, const PropagatorBackend& backend)
      : backend_(backend), t_on_(p.t_on) {
    backend.validate();
    validate(p);
    battery_ = protocol_hamiltonian(p, ProtocolPhase::BeforeCharging);
    charging_ = protocol_hamiltonian(p, ProtocolPhase::Charging);
    auto gs = ground_state(battery_);
    ground_energy_ = gs.energy;
    degeneracy_ = gs.degeneracy;
    initial_ = std::move(gs.state);
    if (backend_.kind == BackendKind::DenseEigen) {
      charge_.emplace(charging_, initial_);
      charge_energy_.emplace(charge_->observe(battery_));
      if (t_on_) {
        after_.emplace(battery_, charge_->state_at(*t_on_));
        after_energy_.emplace(after_->observe(battery_));
      }
    }
    cursor_state_ = initial_;
  }

  // The spectral observables point into the propagators.
  ProtocolEvolution(const ProtocolEvolution&) = delete;
  ProtocolEvolution& operator=(const ProtocolEvolution&) = delete;

  const SparseOperator& battery() const noexcept { return battery_; }
  const SparseOperator& charging() const noexcept { return charging_; }
  const StateVector& initial_state() const noexcept { return initial_; }
  double ground_energy() const noexcept { return ground_energy_; }
  int ground_degeneracy() const noexcept { return degeneracy_; }

  StateVector state_at(double t) {
    check_time(t);
    if (backend_.kind == BackendKind::DenseEigen) {
      if (t_on_ && t > *t_on_) return after_->state_at(t - *t_on_);
      return charge_->state_at(t);
    }
    return advance_to(t);
  }

  double battery_energy(double t) {
    check_time(t);
    if (backend_.kind == BackendKind::DenseEigen) {
      if (t_on_ && t > *t_on_) return after_energy_->value(t - *t_on_);
      return charge_energy_->value(t);
    }
    return expectation(battery_, advance_to(t));
  }

  /// Energies at `times`; ascending order keeps the Krylov path sequential.
  std::vector<double> battery_energies(std::span<const double> times) {
    std::vector<double> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(battery_energy(t));
    return out;
  }

 private:
  static void check_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("sample times must be finite and >= 0");
  }

  StateVector advance_to(double t) {
    if (t < cursor_time_) {
      cursor_time_ = 0.0;
      cursor_state_ = initial_;
    }
    const double switch_off = t_on_.value_or(std::numeric_limits<double>::infinity());
    if (cursor_time_ < switch_off) {
      const double until = std::min(t, switch_off);
      if (until > cursor_time_) {
        cursor_state_ = krylov_propagate(charging_, cursor_state_, until - cursor_time_,
                                         backend_.krylov_dim, backend_.tolerance);
        cursor_time_ = until;
      }
    }
    if (t > cursor_time_) {
      cursor_state_ = krylov_propagate(battery_, cursor_state_, t - cursor_time_,
                                       backend_.krylov_dim, backend_.tolerance);
      cursor_time_ = t;
    }
    return cursor_state_;
  }

  PropagatorBackend backend_;
  std::optional<double> t_on_;
  SparseOperator battery_;
  SparseOperator charging_;
  StateVector initial_;
  double ground_energy_ = 0.0;
  int degeneracy_ = 1;
  std::optional<SpectralPropagator> charge_;
  std::optional<SpectralPropagator::Observable> charge_energy_;
  std::optional<SpectralPropagator> after_;
  std::optional<SpectralPropagator::Observable> after_energy_;
  double cursor_time_ = 0.0;
  StateVector cursor_state_;
};

struct EnergySample {
  double t;
  double battery_energy;
};

/// <H_B>(t) on every grid time.
inline std::vector<EnergySample> evolve_protocol(const ProtocolSpec& p, const TimeGrid& grid,
                                                 const PropagatorBackend& backend = {}) {
  ProtocolEvolution evolution(p, backend);
  const auto times = grid.times();
  std::vector<EnergySample> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, evolution.battery_energy(t)});
  return out;
}

}  // namespace qbattery
