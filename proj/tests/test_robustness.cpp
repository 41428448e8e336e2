// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qramp/robustness.hpp"

using namespace qramp;

namespace {

Scenario small_scenario() {
  return Scenario{TwoQubitParams{1.0}, 0.0,  4.0, RangeScenario(-2.0, 2.0),
                  FidelityMode::pure,  0.99};
}

OptimizationOutcome small_outcome(const PreparedScenario& ps) {
  OptimizeOptions opt;
  opt.n_restarts = 1;
  opt.seed = 31;
  opt.max_iterations = 150;
  opt.stop_fidelity = 0.99;
  opt.compute_trajectory = false;
  return optimize_at(ps, 3.0, 6, opt);
}

}  // namespace

TEST_CASE("zero sigma leaves knots untouched") {
  Rng rng(1);
  Eigen::VectorXd knots(4);
  knots << 0.1, -0.3, 0.5, 0.0;
  const Eigen::VectorXd out = perturb_knots(knots, 0.0, rng, nullptr);
  CHECK((out - knots).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("perturbation statistics reproduce sigma") {
  const double sigma = 0.3;
  const int n = 100000;
  Rng rng(2024);
  Eigen::VectorXd one(1);
  one << 0.0;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = perturb_knots(one, sigma, rng, nullptr)[0];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(sd - sigma) < 0.02 * sigma);
  CHECK(std::abs(mean) < 5.0 * sigma / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("clamped perturbations stay in range") {
  const RangeScenario r(-0.5, 0.5);
  Rng rng(7);
  Eigen::VectorXd knots = Eigen::VectorXd::Zero(6);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::VectorXd out = perturb_knots(knots, 5.0, rng, &r);
    for (int i = 0; i < out.size(); ++i) {
      CHECK(out[i] >= r.g_min);
      CHECK(out[i] <= r.g_max);
    }
  }
}

TEST_CASE("sigma zero reproduces the optimized fidelity exactly") {
  const PreparedScenario ps = PreparedScenario::prepare(small_scenario());
  const OptimizationOutcome outcome = small_outcome(ps);

  NoiseConfig cfg;
  cfg.sigma = 0.0;
  cfg.n_realizations = 3;
  cfg.seed = 5;
  const NoiseReport rep = noise_ensemble(ps, outcome, cfg);
  CHECK(rep.mean_f == outcome.best_fidelity);  // bitwise: same code path
  CHECK(rep.std_f == 0.0);
  CHECK(rep.failures == 0);
  CHECK(rep.valid);
}

TEST_CASE("ensembles are reproducible and realization-indexed") {
  const PreparedScenario ps = PreparedScenario::prepare(small_scenario());
  const OptimizationOutcome outcome = small_outcome(ps);

  NoiseConfig cfg;
  cfg.sigma = 0.05;
  cfg.n_realizations = 6;
  cfg.seed = 12;
  const NoiseReport a = noise_ensemble(ps, outcome, cfg);
  const NoiseReport b = noise_ensemble(ps, outcome, cfg);
  CHECK((a.samples - b.samples).cwiseAbs().maxCoeff() == 0.0);

  // Realization i depends only on (seed, i): a shorter run is a prefix.
  cfg.n_realizations = 3;
  const NoiseReport c = noise_ensemble(ps, outcome, cfg);
  for (int i = 0; i < 3; ++i) CHECK(c.samples[i] == a.samples[i]);

  // Aggregates recomputed from samples match stored values.
  const double mean = a.samples.mean();
  CHECK(a.mean_f == doctest::Approx(mean).epsilon(1e-15));
  double ss = 0.0;
  for (int i = 0; i < a.samples.size(); ++i)
    ss += (a.samples[i] - mean) * (a.samples[i] - mean);
  CHECK(a.std_f ==
        doctest::Approx(std::sqrt(ss / (a.samples.size() - 1)))
            .epsilon(1e-15));
  CHECK(a.sem_f ==
        doctest::Approx(a.std_f / std::sqrt(6.0)).epsilon(1e-15));
}

TEST_CASE("noise does not help, statistically") {
  const PreparedScenario ps = PreparedScenario::prepare(small_scenario());
  const OptimizationOutcome outcome = small_outcome(ps);

  NoiseConfig cfg;
  cfg.sigma = 0.05;
  cfg.n_realizations = 50;
  cfg.seed = 9;
  const NoiseReport rep = noise_ensemble(ps, outcome, cfg);
  CHECK(rep.valid);
  CHECK(rep.mean_f <= outcome.best_fidelity + 2.0 * rep.sem_f);
  CHECK(rep.mean_f > 0.5);  // the protocol survives mild noise
}

TEST_CASE("noise config validation") {
  const PreparedScenario ps = PreparedScenario::prepare(small_scenario());
  const OptimizationOutcome outcome = small_outcome(ps);
  NoiseConfig cfg;
  cfg.n_realizations = 0;
  CHECK_THROWS_AS(noise_ensemble(ps, outcome, cfg), ValidationError);
  cfg.n_realizations = 1;
  cfg.sigma = -0.1;
  CHECK_THROWS_AS(noise_ensemble(ps, outcome, cfg), ValidationError);
}
