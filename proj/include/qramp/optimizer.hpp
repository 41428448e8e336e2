// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "qramp/control.hpp"
#include "qramp/core.hpp"
#include "qramp/models.hpp"
#include "qramp/propagator.hpp"

namespace qramp {

using ModelParams =
    std::variant<TwoQubitParams, FermionModelParams, ThreeComponentParams>;

/// One experiment definition: model family, initial/target couplings, the
/// accessible range, the fidelity form, and the scenario's success threshold.
/// g2 may (and usually does) lie outside the range.
struct Scenario {
  ModelParams model;
  double g1 = 0.0;
  double g2 = 0.0;
  RangeScenario range{-1.0, 1.0};
  FidelityMode mode = FidelityMode::pure;
  double threshold = 0.99;
};

/// Scenario with its model and boundary states built. Construction performs
/// the eigensolves once; optimization schedules reuse the instance.
struct PreparedScenario {
  Scenario scenario;
  ModelInstance model;
  StateVector ini;
  StateVector tar;

  static PreparedScenario prepare(const Scenario& s);

  /// Assembles a prepared scenario from explicit parts (used for shifted-
  /// drift equivalence checks and custom models).
  static PreparedScenario from_parts(Scenario s, ModelInstance m,
                                     StateVector ini, StateVector tar);

  FidelityEvaluator evaluator() const;
};

struct BfgsOptions {
  double c1 = 1e-4;                  // Armijo constant
  double c2 = 0.9;                   // strong Wolfe curvature constant
  double grad_tol = 1e-8;            // gradient infinity-norm stop
  double f_tol = 1e-12;              // objective decrease stop
  int max_iterations = 500;
  double stop_below = -1.0;          // early exit once f <= stop_below (<0: off)
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;   // infinity norm at the last iterate
  bool converged = false;
  bool line_search_failed = false;
};

/// Inverse-Hessian BFGS with a strong Wolfe line search. Returns the best
/// iterate seen; a line-search failure sets the flag instead of throwing.
BfgsResult bfgs_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                         const std::function<Eigen::VectorXd(
                             const Eigen::VectorXd&)>& grad,
                         const Eigen::VectorXd& x0, const BfgsOptions& opt = {});

/// Central finite differences, h = 1e-5 per coordinate; the 2n probe
/// evaluations run as independent parallel tasks.
Eigen::VectorXd gradient_fd(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& u, double h = 1e-5);

/// 1 - final fidelity as a function of unconstrained knot coordinates.
class ObjectiveContext {
 public:
  ObjectiveContext(const PreparedScenario& ps, double duration,
                   PropagatorOptions prop = {});

  double operator()(const Eigen::VectorXd& u) const;
  double fidelity_of_knots(const Eigen::VectorXd& knots) const;

 private:
  const PreparedScenario* ps_;
  double duration_;
  PropagatorOptions prop_;
  FidelityEvaluator evaluator_;
};

struct OptimizeOptions {
  int n_restarts = 10;        // random initializations on top of the ramp
  std::uint64_t seed = 1234;
  int max_iterations = 500;
  double stop_fidelity = -1.0;  // stop once any start reaches this fidelity
  PropagatorOptions prop{};
  std::vector<Eigen::VectorXd> warm_starts;  // extra knot initializations
  bool compute_trajectory = true;
  int trajectory_samples = 201;
  double grad_tol = 1e-8;
  double f_tol = 1e-12;
};

struct OptimizationOutcome {
  double best_fidelity = 0.0;
  Eigen::VectorXd knots;
  double duration = 0.0;
  int m_points = 0;
  int restarts_used = 0;
  int iterations = 0;        // BFGS iterations of the winning start
  double gradient_norm = 0.0;
  Trajectory trajectory;     // empty times when compute_trajectory is false
};

/// Best of bfgs_minimize runs started from the clipped linear ramp
/// g1 -> g2, any caller-provided warm starts, and n_restarts seeded uniform
/// draws over the range.
OptimizationOutcome optimize_at(const PreparedScenario& ps, double duration,
                                int m_points, const OptimizeOptions& opt);
OptimizationOutcome optimize_at(const Scenario& s, double duration,
                                int m_points, const OptimizeOptions& opt);

struct EscalationRow {
  int m_points = 0;
  double best_fidelity = 0.0;  // best seen up to and including this M
};

struct EscalationResult {
  double best_fidelity = 0.0;
  int m_used = 0;
  OptimizationOutcome best_outcome;
  std::vector<EscalationRow> rows;
};

/// Optimize along an ascending M schedule, warm-starting each M from the
/// previous best knots resampled through the spline. Stops when the best
/// fidelity improves by less than eps_m, when stop_fidelity is reached, or
/// when the schedule is exhausted.
EscalationResult escalate_m(const PreparedScenario& ps, double duration,
                            const std::vector<int>& m_schedule, double eps_m,
                            const OptimizeOptions& opt);

struct QSLScanPoint {
  double duration = 0.0;
  double best_fidelity = 0.0;
  int m_used = 0;
};

struct QSLEstimate {
  double t_qsl = 0.0;
  double threshold = 0.0;
  double resolution = 0.0;
  std::vector<QSLScanPoint> scan;  // ascending in duration
  OptimizationOutcome outcome_at_qsl;
};

/// Bisection for the smallest duration whose optimized fidelity reaches
/// `threshold` at fixed M. Nearby results warm-start each probe. Throws
/// BracketError when the upper end of the bracket cannot reach the threshold.
double min_duration_for(const PreparedScenario& ps, int m_points,
                        double threshold, std::pair<double, double> t_bracket,
                        double resolution, const OptimizeOptions& opt,
                        QSLEstimate* details = nullptr);

/// min_duration_for with escalate_m at every probed duration.
QSLEstimate estimate_qsl(const PreparedScenario& ps, double threshold,
                         const std::vector<int>& m_schedule,
                         std::pair<double, double> t_bracket, double resolution,
                         const OptimizeOptions& opt);

/// Re-propagate fixed optimized knots under a model rebuilt with a larger
/// cutoff; boundary states are rebuilt for the new basis.
Trajectory reevaluate_protocol(const Scenario& s,
                               const OptimizationOutcome& outcome,
                               const ModelParams& alternative,
                               const PropagatorOptions& prop = {},
                               int n_samples = 201);

/// Deterministic clipped linear ramp from g1 toward g2 on M knots.
Eigen::VectorXd ramp_knots(double g1, double g2, int m_points,
                           const RangeScenario& range);

/// Default M escalation schedule.
const std::vector<int>& default_m_schedule();

}  // namespace qramp
