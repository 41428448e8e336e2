// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "qramp/errors.hpp"

namespace qramp {

using Complex = std::complex<double>;

// Numerical contracts shared across the library.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kStateNormTol = 1e-10;
inline constexpr double kDensityTol = 1e-10;
inline constexpr double kDegeneracyTol = 1e-10;
inline constexpr int kMaxDenseDim = 5000;

/// Unit-norm complex amplitude vector over an ordered basis.
class StateVector {
 public:
  /// Placeholder one-dimensional unit state; keeps aggregates that carry a
  /// StateVector default-constructible without weakening the norm invariant.
  StateVector() : amps_(Eigen::VectorXcd::Ones(1)) {}

  /// Accepts a vector already normalized to |norm - 1| <= 1e-10.
  static StateVector from_unit(Eigen::VectorXcd amplitudes);

  /// Rescales to unit norm; rejects (near-)zero vectors.
  static StateVector normalized(Eigen::VectorXcd amplitudes);

  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }

 private:
  explicit StateVector(Eigen::VectorXcd v) : amps_(std::move(v)) {}
  Eigen::VectorXcd amps_;
};

/// Dense complex Hermitian matrix. Models built from real orbitals carry a
/// real-symmetric mirror that the eigensolver and propagator use directly.
class HermitianOperator {
 public:
  explicit HermitianOperator(Eigen::MatrixXcd entries);
  static HermitianOperator from_real(Eigen::MatrixXd symmetric);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

  bool is_real() const { return real_.has_value(); }
  const Eigen::MatrixXd& real_entries() const;

 private:
  HermitianOperator() = default;
  Eigen::MatrixXcd entries_;
  std::optional<Eigen::MatrixXd> real_;
};

/// Reduced state of a subsystem: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  const Eigen::MatrixXcd& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }

  double purity() const;

  /// Eigenvalue check (eigenvalues >= -1e-10); O(dim^3), used by tests.
  bool is_positive_semidefinite() const;

 private:
  Eigen::MatrixXcd entries_;
};

/// Full eigendecomposition, energies ascending, orthonormal eigenvectors.
struct Spectrum {
  Eigen::VectorXd energies;
  std::vector<StateVector> states;
};

/// All eigenpairs of H. Eigenvector global phases are fixed so the
/// largest-magnitude component is real positive (reproducible states).
Spectrum full_spectrum(const HermitianOperator& h);

/// Lowest eigenpair. Throws DegeneracyError when the ground state is not
/// isolated: E1 - E0 < 1e-10 * max(1, |E0|).
std::pair<double, StateVector> ground_state(const HermitianOperator& h);

/// |<a|b>|^2; symmetric and invariant under global phases.
double fidelity_pure(const StateVector& a, const StateVector& b);

/// <s|H|s>. The imaginary part must be below 1e-10 and is discarded.
double expectation(const HermitianOperator& h, const StateVector& s);

/// Trace out the trailing tensor factor. Basis convention is fixed: the kept
/// index is slow, the traced index fast (flat = kept * dim_trace + traced).
DensityMatrix partial_trace_last(const StateVector& s, Eigen::Index dim_keep,
                                 Eigen::Index dim_trace);

/// Subsystem fidelity [<tar|rho|tar>]^2 together with the unsquared overlap
/// <tar|rho|tar> as a diagnostic.
struct MixedFidelity {
  double fidelity = 0.0;
  double overlap = 0.0;
};
MixedFidelity fidelity_mixed(const DensityMatrix& rho, const StateVector& tar);

namespace detail {
/// Phase convention used for all stored eigenvectors.
void fix_global_phase(Eigen::VectorXcd& v);

/// Partial trace over a raw (possibly slightly non-normalized) vector.
Eigen::MatrixXcd partial_trace_raw(const Eigen::VectorXcd& amps,
                                   Eigen::Index dim_keep,
                                   Eigen::Index dim_trace);

/// <tar| rho(psi) |tar> evaluated without forming rho.
double reduced_overlap(const Eigen::VectorXcd& psi,
                       const Eigen::VectorXcd& tar, Eigen::Index dim_keep,
                       Eigen::Index dim_trace);
}  // namespace detail

}  // namespace qramp
