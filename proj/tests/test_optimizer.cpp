// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qramp/optimizer.hpp"

using namespace qramp;

namespace {

Scenario two_qubit_scenario_i() {
  return Scenario{TwoQubitParams{1.0}, 0.0,  4.0, RangeScenario(-2.0, 2.0),
                  FidelityMode::pure,  0.99};
}

}  // namespace

TEST_CASE("finite-difference gradient on closed forms") {
  auto quadratic = [](const Eigen::VectorXd& u) { return u.squaredNorm(); };
  Eigen::VectorXd u(2);
  u << 1.0, 2.0;
  const Eigen::VectorXd g = gradient_fd(quadratic, u);
  CHECK(std::abs(g[0] - 2.0) < 1e-8);
  CHECK(std::abs(g[1] - 4.0) < 1e-8);

  auto constant = [](const Eigen::VectorXd&) { return 3.5; };
  CHECK(gradient_fd(constant, u).cwiseAbs().maxCoeff() == 0.0);

  auto bad = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(gradient_fd(bad, u), NumericalError);
}

TEST_CASE("bfgs on a 1d parabola converges in a few iterations") {
  auto f = [](const Eigen::VectorXd& u) {
    return (u[0] - 1.0) * (u[0] - 1.0);
  };
  auto g = [&](const Eigen::VectorXd& u) { return gradient_fd(f, u); };
  Eigen::VectorXd x0(1);
  x0 << 5.0;
  const BfgsResult res = bfgs_minimize(f, g, x0);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-8);
  CHECK(res.iterations <= 10);
  CHECK(res.converged);
}

TEST_CASE("bfgs solves the rosenbrock valley") {
  auto f = [](const Eigen::VectorXd& u) {
    const double a = 1.0 - u[0];
    const double b = u[1] - u[0] * u[0];
    return a * a + 100.0 * b * b;
  };
  auto g = [&](const Eigen::VectorXd& u) { return gradient_fd(f, u); };
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const BfgsResult res = bfgs_minimize(f, g, x0);
  CHECK(std::abs(res.x[0] - 1.0) < 1e-6);
  CHECK(std::abs(res.x[1] - 1.0) < 1e-6);
}

TEST_CASE("bfgs handles an ill-conditioned quadratic") {
  const int n = 6;
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i)
    scale[i] = std::pow(1e4, static_cast<double>(i) / (n - 1));
  auto f = [&](const Eigen::VectorXd& u) {
    return 0.5 * (scale.array() * u.array().square()).sum();
  };
  auto g = [&](const Eigen::VectorXd& u) { return gradient_fd(f, u); };
  const BfgsResult res = bfgs_minimize(f, g, Eigen::VectorXd::Ones(n));
  CHECK(res.f < 1e-14);
  CHECK(res.gradient_norm < 1e-6);
}

TEST_CASE("objective at zero knots equals one minus the initial overlap") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  const ObjectiveContext objective(ps, 3.0);
  const Eigen::VectorXd u = Eigen::VectorXd::Zero(5);  // midpoint = g = 0
  CHECK(objective(u) == doctest::Approx(0.2185).epsilon(3e-3));
}

TEST_CASE("objective vanishes for a trivial scenario at short time") {
  Scenario s = two_qubit_scenario_i();
  s.g2 = 0.0;  // initial state is the target
  const PreparedScenario ps = PreparedScenario::prepare(s);
  const ObjectiveContext objective(ps, 1e-6);
  CHECK(objective(Eigen::VectorXd::Zero(3)) < 1e-8);
}

TEST_CASE("objective is locally lipschitz in the knot coordinates") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  const ObjectiveContext objective(ps, 2.0);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(4, 0.2);
  const double f0 = objective(u);
  u[2] += 1e-6;
  CHECK(std::abs(objective(u) - f0) < 1e-4);
}

TEST_CASE("finite differences agree with a four-point stencil on the live "
          "objective") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  const ObjectiveContext objective(ps, 2.0);
  auto f = [&](const Eigen::VectorXd& u) { return objective(u); };
  Eigen::VectorXd u(5);
  u << 0.3, -0.2, 0.5, 0.1, -0.4;
  const Eigen::VectorXd g2 = gradient_fd(f, u, 1e-5);
  const Eigen::VectorXd g4 = oracle::gradient_4point(f, u, 1e-3);
  CHECK((g2 - g4).norm() / g4.norm() < 1e-4);
}

TEST_CASE("ramp start clips into the accessible range") {
  const Eigen::VectorXd knots =
      ramp_knots(0.0, 4.0, 5, RangeScenario(-2.0, 2.0));
  CHECK(knots[0] == 0.0);
  CHECK(knots[2] == 2.0);  // clipped
  CHECK(knots[4] == 2.0);
  const Eigen::VectorXd single =
      ramp_knots(0.0, 4.0, 1, RangeScenario(-2.0, 2.0));
  CHECK(single[0] == 2.0);
}

TEST_CASE("optimize_at reaches 99 percent on the reference scenario") {
  OptimizeOptions opt;
  opt.n_restarts = 1;
  opt.seed = 4242;
  opt.max_iterations = 250;
  opt.stop_fidelity = 0.992;
  opt.compute_trajectory = true;
  const OptimizationOutcome out =
      optimize_at(two_qubit_scenario_i(), 3.0, 9, opt);
  CHECK(out.best_fidelity >= 0.99);
  CHECK(out.m_points == 9);
  for (int i = 0; i < out.knots.size(); ++i) {
    CHECK(out.knots[i] >= -2.0);
    CHECK(out.knots[i] <= 2.0);
  }
  // Trajectory endpoint agrees with the optimized objective value.
  const Eigen::Index last = out.trajectory.fidelities.size() - 1;
  CHECK(std::abs(out.trajectory.fidelities[last] - out.best_fidelity) < 1e-6);
  CHECK(out.trajectory.norm_drift < 1e-8);
}

TEST_CASE("single constant knot at vanishing duration keeps the overlap") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  OptimizeOptions opt;
  opt.n_restarts = 2;
  opt.max_iterations = 40;
  opt.compute_trajectory = false;
  const OptimizationOutcome out = optimize_at(ps, 1e-5, 1, opt);
  CHECK(out.best_fidelity ==
        doctest::Approx(fidelity_pure(ps.ini, ps.tar)).epsilon(1e-4));
}

TEST_CASE("optimization is reproducible for a fixed seed") {
  OptimizeOptions opt;
  opt.n_restarts = 2;
  opt.seed = 77;
  opt.max_iterations = 60;
  opt.compute_trajectory = false;
  const Scenario s = two_qubit_scenario_i();
  const OptimizationOutcome a = optimize_at(s, 2.0, 4, opt);
  const OptimizationOutcome b = optimize_at(s, 2.0, 4, opt);
  CHECK(a.best_fidelity == b.best_fidelity);
  CHECK((a.knots - b.knots).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("escalation is monotone and saturates quickly at long duration") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  OptimizeOptions opt;
  opt.n_restarts = 1;
  opt.seed = 11;
  opt.max_iterations = 200;
  opt.stop_fidelity = 0.9995;
  opt.compute_trajectory = false;
  const EscalationResult esc =
      escalate_m(ps, 6.0, {2, 3, 5, 7, 9}, 1e-4, opt);
  CHECK(esc.best_fidelity > 0.999);
  CHECK(esc.m_used <= 5);  // long protocols need few optimization instants
  for (std::size_t i = 1; i < esc.rows.size(); ++i)
    CHECK(esc.rows[i].best_fidelity >= esc.rows[i - 1].best_fidelity);
}

TEST_CASE("durations beyond the bracket floor only help") {
  // Statistical check over seeds: F_max(T=3) >= F_max(T=2) - 1e-3.
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    OptimizeOptions opt;
    opt.n_restarts = 1;
    opt.seed = seed;
    opt.max_iterations = 120;
    opt.stop_fidelity = 0.999;
    opt.compute_trajectory = false;
    const double f_short = optimize_at(ps, 2.0, 5, opt).best_fidelity;
    const double f_long = optimize_at(ps, 3.0, 5, opt).best_fidelity;
    CHECK(f_long >= f_short - 1e-3);
  }
}

TEST_CASE("bisection degenerates to the floor when the threshold is free") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  OptimizeOptions opt;
  opt.n_restarts = 0;
  opt.max_iterations = 30;
  opt.compute_trajectory = false;
  // Threshold below the initial overlap: satisfied everywhere.
  const double t =
      min_duration_for(ps, 3, 0.5, {0.05, 1.0}, 0.05, opt);
  CHECK(t == doctest::Approx(0.05));
}

TEST_CASE("bisection reports an unusable bracket") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  OptimizeOptions opt;
  opt.n_restarts = 0;
  opt.max_iterations = 20;
  opt.compute_trajectory = false;
  CHECK_THROWS_AS(
      min_duration_for(ps, 2, 0.9999, {0.05, 0.2}, 0.05, opt),
      BracketError);
}

TEST_CASE("qsl scan is recorded and ordered") {
  const PreparedScenario ps =
      PreparedScenario::prepare(two_qubit_scenario_i());
  OptimizeOptions opt;
  opt.n_restarts = 1;
  opt.seed = 5;
  opt.max_iterations = 150;
  opt.compute_trajectory = false;
  const QSLEstimate est =
      estimate_qsl(ps, 0.9, {2, 3, 5}, {0.4, 4.0}, 0.1, opt);
  CHECK(est.threshold == 0.9);
  CHECK(est.t_qsl > 0.4);
  CHECK(est.t_qsl < 4.0);
  REQUIRE(est.scan.size() >= 3);
  for (std::size_t i = 1; i < est.scan.size(); ++i) {
    CHECK(est.scan[i].duration > est.scan[i - 1].duration);
    // Probes stop early once the threshold is certified, so monotonicity in
    // T applies up to that cap.
    if (est.scan[i - 1].best_fidelity < est.threshold)
      CHECK(est.scan[i].best_fidelity >=
            est.scan[i - 1].best_fidelity - 1e-3);
    else
      CHECK(est.scan[i].best_fidelity >= est.threshold - 1e-9);
  }
}

TEST_CASE("shifting the drift by g1 Hc leaves the optimum unchanged") {
  // Scenario (g1 = 0.3, range [-0.2, 0.8]) against the shifted scenario
  // (g1 = 0, range [-0.5, 0.5]) with drift H0 + 0.3 Hc.
  const ModelInstance base = build_two_qubit({1.0});
  const double g1 = 0.3, g2 = 2.5;  // shifted target 2.2, outside the range

  Scenario s_orig{TwoQubitParams{1.0}, g1, g2, RangeScenario(-0.2, 0.8),
                  FidelityMode::pure, 0.99};
  const PreparedScenario ps_orig = PreparedScenario::prepare(s_orig);

  ModelInstance shifted{
      HermitianOperator::from_real(base.h0.real_entries() +
                                   g1 * base.hc.real_entries()),
      base.hc, "two_qubit", 4, 1, nullptr};
  Scenario s_shift{TwoQubitParams{1.0}, 0.0, g2 - g1,
                   RangeScenario(-0.5, 0.5), FidelityMode::pure, 0.99};
  auto [ini_s, tar_s] = make_scenario_states(shifted, 0.0, g2 - g1);
  const PreparedScenario ps_shift = PreparedScenario::from_parts(
      s_shift, std::move(shifted), std::move(ini_s), std::move(tar_s));

  // Compare at a duration long enough for saturation: the optimum is then
  // sharp and both formulations converge to the same value.
  OptimizeOptions opt;
  opt.n_restarts = 2;
  opt.seed = 99;
  opt.max_iterations = 500;
  opt.compute_trajectory = false;
  const OptimizationOutcome a = optimize_at(ps_orig, 5.0, 8, opt);
  const OptimizationOutcome b = optimize_at(ps_shift, 5.0, 8, opt);
  CHECK(std::abs(a.best_fidelity - b.best_fidelity) < 1e-6);
  CHECK(a.best_fidelity > 0.9999);
}

TEST_CASE("protocol reevaluation validates cutoffs") {
  Scenario s{FermionModelParams{40.0 / 6.0, 6}, 0.0,  1.0,
             RangeScenario(-0.5, 0.5),          FidelityMode::pure, 0.99};
  OptimizationOutcome outcome;
  outcome.duration = 1.0;
  outcome.m_points = 3;
  outcome.knots = Eigen::VectorXd::Zero(3);
  outcome.best_fidelity = 0.5;

  CHECK_THROWS_AS(
      reevaluate_protocol(s, outcome, FermionModelParams{40.0 / 6.0, 5}),
      ValidationError);
  CHECK_THROWS_AS(reevaluate_protocol(s, outcome, TwoQubitParams{1.0}),
                  ValidationError);

  const Trajectory t = reevaluate_protocol(
      s, outcome, FermionModelParams{40.0 / 6.0, 7}, {}, 11);
  CHECK(t.times.size() == 11);
  CHECK(t.norm_drift < 1e-8);
}
