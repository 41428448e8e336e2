// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "qramp/optimizer.hpp"
#include "qramp/rng.hpp"

namespace qramp {

struct NoiseConfig {
  double sigma = 0.0;
  int n_realizations = 100;
  std::uint64_t seed = 1234;
  bool clamp_noisy = false;  // clamp perturbed knots back into the range
};

/// Ensemble statistics over noisy realizations of one optimized protocol.
/// Failed propagations are stored as NaN samples and excluded from the
/// aggregates; the report is invalid when more than 5% fail.
struct NoiseReport {
  double sigma = 0.0;
  double mean_f = 0.0;
  double std_f = 0.0;   // sample standard deviation (n - 1)
  double sem_f = 0.0;   // standard error of the mean
  Eigen::VectorXd samples;
  int failures = 0;
  bool valid = true;
  std::string rng_algorithm = Rng::kAlgorithm;
};

/// Adds i.i.d. Normal(0, sigma^2) to each knot value. Clamps only when a
/// range is supplied; unclamped knots are still hard-limited at field
/// evaluation time.
Eigen::VectorXd perturb_knots(const Eigen::VectorXd& knots, double sigma,
                              Rng& rng, const RangeScenario* clamp_range);

/// Propagates n seeded noisy realizations of the outcome's protocol and
/// reports mean, sample standard deviation, and standard error of the mean.
/// Realization i depends only on (seed, i).
NoiseReport noise_ensemble(const PreparedScenario& ps,
                           const OptimizationOutcome& outcome,
                           const NoiseConfig& cfg,
                           const PropagatorOptions& prop = {});

}  // namespace qramp
