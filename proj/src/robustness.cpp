// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/robustness.hpp"

#include <cmath>
#include <limits>

#include "qramp/parallel.hpp"

namespace qramp {

Eigen::VectorXd perturb_knots(const Eigen::VectorXd& knots, double sigma,
                              Rng& rng, const RangeScenario* clamp_range) {
  if (sigma < 0.0) throw ValidationError("perturb_knots: sigma must be >= 0");
  Eigen::VectorXd out = knots;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] += sigma * rng.gaussian();
    if (clamp_range) out[i] = clamp_range->clamp(out[i]);
  }
  return out;
}

NoiseReport noise_ensemble(const PreparedScenario& ps,
                           const OptimizationOutcome& outcome,
                           const NoiseConfig& cfg,
                           const PropagatorOptions& prop) {
  if (cfg.n_realizations < 1)
    throw ValidationError("noise_ensemble: need at least one realization");
  if (cfg.sigma < 0.0)
    throw ValidationError("noise_ensemble: sigma must be >= 0");
  if (outcome.knots.size() < 1)
    throw ValidationError("noise_ensemble: outcome has no knots");

  const RangeScenario& range = ps.scenario.range;
  const FidelityEvaluator evaluator = ps.evaluator();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  NoiseReport report;
  report.sigma = cfg.sigma;
  report.samples.setConstant(cfg.n_realizations, nan);

  parallel_for(static_cast<std::size_t>(cfg.n_realizations),
               [&](std::size_t i) {
                 Rng rng(derive_seed(cfg.seed, i));
                 const Eigen::VectorXd noisy = perturb_knots(
                     outcome.knots, cfg.sigma, rng,
                     cfg.clamp_noisy ? &range : nullptr);
                 const ControlProtocol protocol =
                     ControlProtocol::with_unchecked_knots(outcome.duration,
                                                           noisy, range);
                 try {
                   const Trajectory traj = propagate(ps.model, protocol,
                                                     ps.ini, 2, evaluator,
                                                     prop);
                   report.samples[static_cast<Eigen::Index>(i)] =
                       traj.fidelities[traj.fidelities.size() - 1];
                 } catch (const NumericalError&) {
                   // NaN marks the failed realization
                 }
               });

  int good = 0;
  double anchor = 0.0;
  for (Eigen::Index i = 0; i < report.samples.size(); ++i) {
    if (std::isnan(report.samples[i])) {
      ++report.failures;
    } else {
      if (good == 0) anchor = report.samples[i];
      ++good;
    }
  }
  report.valid =
      report.failures * 20 <= cfg.n_realizations;  // > 5% failed -> invalid
  if (good == 0) {
    report.valid = false;
    return report;
  }
  // Mean anchored at the first sample: deviations of identical samples are
  // exactly zero, so a sigma = 0 ensemble reproduces the optimized fidelity
  // bit for bit.
  double dev_sum = 0.0;
  for (Eigen::Index i = 0; i < report.samples.size(); ++i)
    if (!std::isnan(report.samples[i]))
      dev_sum += report.samples[i] - anchor;
  report.mean_f = anchor + dev_sum / good;
  double ss = 0.0;
  for (Eigen::Index i = 0; i < report.samples.size(); ++i)
    if (!std::isnan(report.samples[i])) {
      const double d = report.samples[i] - report.mean_f;
      ss += d * d;
    }
  report.std_f = good > 1 ? std::sqrt(ss / (good - 1)) : 0.0;
  report.sem_f = report.std_f / std::sqrt(static_cast<double>(good));
  return report;
}

}  // namespace qramp
