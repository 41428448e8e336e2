// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>

#include "qramp/control.hpp"
#include "qramp/core.hpp"
#include "qramp/models.hpp"

namespace qramp {

struct PropagatorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  long max_steps = 5'000'000;
};

/// Fidelity of the evolving state against the target: squared overlap for
/// pure scenarios, the squared reduced-density-matrix overlap for
/// three-component scenarios.
enum class FidelityMode { pure, reduced };

/// Maps a raw complex state to a fidelity in [0, 1]. Evaluators must be
/// invariant under the state's global phase.
using FidelityEvaluator = std::function<double(const Eigen::VectorXcd&)>;

FidelityEvaluator make_fidelity_evaluator(const ModelInstance& m,
                                          const StateVector& tar,
                                          FidelityMode mode);

/// Result of one integration of the time-dependent Schroedinger equation.
/// norm_drift is the largest deviation of the state norm from 1 seen at any
/// sample; the final state is renormalized for storage (the drift itself is
/// reported, never hidden).
struct Trajectory {
  Eigen::VectorXd times;
  Eigen::VectorXd fidelities;
  StateVector final_state;
  double norm_drift = 0.0;
  long steps = 0;
  long rejected_steps = 0;
};

/// Integrate d psi/dt = -i (H0 + g(t) Hc) psi with the adaptive embedded
/// Dormand-Prince 5(4) pair, evaluating the control spline at every stage
/// time and sampling the fidelity at n_samples equispaced times (integration
/// stops exactly on each sample time).
Trajectory propagate(const ModelInstance& m, const ControlProtocol& p,
                     const StateVector& psi0, int n_samples,
                     const FidelityEvaluator& fidelity,
                     const PropagatorOptions& opt = {});

/// Final-time fidelity only (two samples: t = 0 and t = T).
double final_fidelity(const ModelInstance& m, const ControlProtocol& p,
                      const StateVector& ini, const StateVector& tar,
                      FidelityMode mode, const PropagatorOptions& opt = {});

}  // namespace qramp
