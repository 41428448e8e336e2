// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace qramp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace

StateVector StateVector::from_unit(Eigen::VectorXcd amplitudes) {
  require(amplitudes.size() > 0, "StateVector: empty amplitude vector");
  const double norm = amplitudes.norm();
  require(std::abs(norm - 1.0) <= kStateNormTol,
          "StateVector: norm " + std::to_string(norm) + " is not 1 within 1e-10");
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::normalized(Eigen::VectorXcd amplitudes) {
  require(amplitudes.size() > 0, "StateVector: empty amplitude vector");
  const double norm = amplitudes.norm();
  require(norm > 1e-300, "StateVector: cannot normalize zero vector");
  amplitudes /= norm;
  return StateVector(std::move(amplitudes));
}

HermitianOperator::HermitianOperator(Eigen::MatrixXcd entries) {
  require(entries.rows() == entries.cols() && entries.rows() > 0,
          "HermitianOperator: matrix must be square and non-empty");
  const double dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol)
    throw ValidationError("HermitianOperator: deviation from Hermiticity " +
                          std::to_string(dev) + " exceeds 1e-12");
  entries_ = std::move(entries);
  if (entries_.imag().cwiseAbs().maxCoeff() == 0.0) real_ = entries_.real();
}

HermitianOperator HermitianOperator::from_real(Eigen::MatrixXd symmetric) {
  require(symmetric.rows() == symmetric.cols() && symmetric.rows() > 0,
          "HermitianOperator: matrix must be square and non-empty");
  const double dev = (symmetric - symmetric.transpose()).cwiseAbs().maxCoeff();
  if (dev > kHermitianTol)
    throw ValidationError("HermitianOperator: deviation from symmetry " +
                          std::to_string(dev) + " exceeds 1e-12");
  HermitianOperator h;
  h.entries_ = symmetric.cast<Complex>();
  h.real_ = std::move(symmetric);
  return h;
}

const Eigen::MatrixXd& HermitianOperator::real_entries() const {
  if (!real_) throw ValidationError("HermitianOperator: operator is not real");
  return *real_;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd entries) {
  require(entries.rows() == entries.cols() && entries.rows() > 0,
          "DensityMatrix: matrix must be square and non-empty");
  const double herm_dev = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
  require(herm_dev <= kDensityTol,
          "DensityMatrix: not Hermitian within 1e-10 (deviation " +
              std::to_string(herm_dev) + ")");
  const Complex tr = entries.trace();
  require(std::abs(tr - Complex(1.0, 0.0)) <= kDensityTol,
          "DensityMatrix: trace " + std::to_string(tr.real()) +
              " is not 1 within 1e-10");
  entries_ = std::move(entries);
}

double DensityMatrix::purity() const {
  return (entries_ * entries_).trace().real();
}

bool DensityMatrix::is_positive_semidefinite() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
      entries_, Eigen::EigenvaluesOnly);
  return solver.info() == Eigen::Success &&
         solver.eigenvalues().minCoeff() >= -kDensityTol;
}

namespace detail {

void fix_global_phase(Eigen::VectorXcd& v) {
  Eigen::Index imax = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v[i]);
    if (m > best) {
      best = m;
      imax = i;
    }
  }
  if (best <= 0.0) return;
  const Complex phase = std::conj(v[imax]) / best;
  v *= phase;
}

Eigen::MatrixXcd partial_trace_raw(const Eigen::VectorXcd& amps,
                                   Eigen::Index dim_keep,
                                   Eigen::Index dim_trace) {
  using RowMat =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(amps.data(), dim_keep, dim_trace);
  return m * m.adjoint();
}

double reduced_overlap(const Eigen::VectorXcd& psi,
                       const Eigen::VectorXcd& tar, Eigen::Index dim_keep,
                       Eigen::Index dim_trace) {
  using RowMat =
      Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(psi.data(), dim_keep, dim_trace);
  // <tar|M M^H|tar> = || M^H tar ||^2
  return (m.adjoint() * tar).squaredNorm();
}

}  // namespace detail

namespace {

Spectrum spectrum_impl(const HermitianOperator& h) {
  Spectrum out;
  const Eigen::Index n = h.dim();
  if (h.is_real()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real_entries());
    if (solver.info() != Eigen::Success)
      throw NumericalError("eigensolver failed to converge (real path, dim " +
                           std::to_string(n) + ")");
    out.energies = solver.eigenvalues();
    out.states.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXcd v = solver.eigenvectors().col(i).cast<Complex>();
      detail::fix_global_phase(v);
      out.states.push_back(StateVector::normalized(std::move(v)));
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.entries());
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigensolver failed to converge (complex path, dim " +
                         std::to_string(n) + ")");
  out.energies = solver.eigenvalues();
  out.states.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXcd v = solver.eigenvectors().col(i);
    detail::fix_global_phase(v);
    out.states.push_back(StateVector::normalized(std::move(v)));
  }
  return out;
}

}  // namespace

Spectrum full_spectrum(const HermitianOperator& h) {
  require(h.dim() <= kMaxDenseDim,
          "full_spectrum: dim " + std::to_string(h.dim()) +
              " exceeds dense-solver limit " + std::to_string(kMaxDenseDim));
  return spectrum_impl(h);
}

std::pair<double, StateVector> ground_state(const HermitianOperator& h) {
  Spectrum s = full_spectrum(h);
  const double e0 = s.energies[0];
  if (s.energies.size() > 1) {
    const double gap = s.energies[1] - e0;
    if (gap < kDegeneracyTol * std::max(1.0, std::abs(e0)))
      throw DegeneracyError(
          "ground_state: ground state not isolated (gap " +
          std::to_string(gap) + " at E0 = " + std::to_string(e0) + ")");
  }
  return {e0, std::move(s.states[0])};
}

double fidelity_pure(const StateVector& a, const StateVector& b) {
  require(a.dim() == b.dim(), "fidelity_pure: dimension mismatch " +
                                  std::to_string(a.dim()) + " vs " +
                                  std::to_string(b.dim()));
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double expectation(const HermitianOperator& h, const StateVector& s) {
  require(h.dim() == s.dim(), "expectation: dimension mismatch " +
                                  std::to_string(h.dim()) + " vs " +
                                  std::to_string(s.dim()));
  const Complex v = s.amplitudes().dot(h.entries() * s.amplitudes());
  if (std::abs(v.imag()) > 1e-10)
    throw NumericalError("expectation: imaginary part " +
                         std::to_string(v.imag()) + " exceeds 1e-10");
  return v.real();
}

DensityMatrix partial_trace_last(const StateVector& s, Eigen::Index dim_keep,
                                 Eigen::Index dim_trace) {
  require(dim_keep >= 1 && dim_trace >= 1 &&
              dim_keep * dim_trace == s.dim(),
          "partial_trace_last: dim_keep * dim_trace must equal state dim");
  return DensityMatrix(
      detail::partial_trace_raw(s.amplitudes(), dim_keep, dim_trace));
}

MixedFidelity fidelity_mixed(const DensityMatrix& rho, const StateVector& tar) {
  require(rho.dim() == tar.dim(), "fidelity_mixed: dimension mismatch " +
                                      std::to_string(rho.dim()) + " vs " +
                                      std::to_string(tar.dim()));
  const Complex v = tar.amplitudes().dot(rho.entries() * tar.amplitudes());
  if (std::abs(v.imag()) > 1e-10)
    throw NumericalError("fidelity_mixed: imaginary overlap " +
                         std::to_string(v.imag()));
  MixedFidelity out;
  out.overlap = v.real();
  out.fidelity = out.overlap * out.overlap;
  return out;
}

}  // namespace qramp
