// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "qramp/parallel.hpp"
#include "qramp/rng.hpp"

namespace qramp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelInstance build_model(const ModelParams& params) {
  return std::visit(
      [](const auto& p) -> ModelInstance {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TwoQubitParams>)
          return build_two_qubit(p);
        else if constexpr (std::is_same_v<T, FermionModelParams>)
          return build_two_component(p);
        else
          return build_three_component(p);
      },
      params);
}

}  // namespace

PreparedScenario PreparedScenario::prepare(const Scenario& s) {
  PreparedScenario ps{s, build_model(s.model),
                      StateVector::normalized(Eigen::VectorXcd::Ones(1)),
                      StateVector::normalized(Eigen::VectorXcd::Ones(1))};
  auto [ini, tar] = make_scenario_states(ps.model, s.g1, s.g2);
  ps.ini = std::move(ini);
  ps.tar = std::move(tar);
  return ps;
}

PreparedScenario PreparedScenario::from_parts(Scenario s, ModelInstance m,
                                              StateVector ini,
                                              StateVector tar) {
  return PreparedScenario{std::move(s), std::move(m), std::move(ini),
                          std::move(tar)};
}

FidelityEvaluator PreparedScenario::evaluator() const {
  return make_fidelity_evaluator(model, tar, scenario.mode);
}

// ---------------------------------------------------------------------------
// Finite-difference gradient
// ---------------------------------------------------------------------------

Eigen::VectorXd gradient_fd(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& u, double h) {
  require(h > 0.0, "gradient_fd: step must be positive");
  const Eigen::Index n = u.size();
  Eigen::VectorXd probes(2 * n);
  parallel_for(static_cast<std::size_t>(2 * n), [&](std::size_t idx) {
    Eigen::VectorXd up = u;
    const Eigen::Index coord = static_cast<Eigen::Index>(idx / 2);
    const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
    up[coord] += sign * h;
    probes[static_cast<Eigen::Index>(idx)] = f(up);
  });
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double fp = probes[2 * i], fm = probes[2 * i + 1];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericalError("gradient_fd: non-finite objective at probe " +
                           std::to_string(i));
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// ---------------------------------------------------------------------------
// BFGS with strong Wolfe line search
// ---------------------------------------------------------------------------

namespace {

struct LineSearchResult {
  double alpha = 0.0;
  double f = kInf;
  bool ok = false;
};

// phi(alpha) = f(x + alpha p) with propagation failures surfaced as +inf,
// which the search treats as an overlong step.
class LineSearch {
 public:
  LineSearch(const std::function<double(const Eigen::VectorXd&)>& f,
             const Eigen::VectorXd& x, const Eigen::VectorXd& p)
      : f_(f), x_(x), p_(p) {
    delta_ = 1e-5 / std::max(1.0, p_.norm());
  }

  double phi(double a) const {
    try {
      const double v = f_(x_ + a * p_);
      return std::isfinite(v) ? v : kInf;
    } catch (const NumericalError&) {
      return kInf;
    }
  }

  // Directional derivative by central difference along p.
  double dphi(double a) const {
    const double fp = phi(a + delta_), fm = phi(a - delta_);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return kInf;
    return (fp - fm) / (2.0 * delta_);
  }

 private:
  const std::function<double(const Eigen::VectorXd&)>& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& p_;
  double delta_;
};

LineSearchResult wolfe_zoom(const LineSearch& ls, double f0, double dphi0,
                            double c1, double c2, double alo, double ahi,
                            double phi_lo) {
  for (int it = 0; it < 40; ++it) {
    const double aj = 0.5 * (alo + ahi);
    const double phj = ls.phi(aj);
    if (phj > f0 + c1 * aj * dphi0 || phj >= phi_lo) {
      ahi = aj;
    } else {
      const double dphj = ls.dphi(aj);
      if (std::isfinite(dphj) && std::abs(dphj) <= -c2 * dphi0)
        return {aj, phj, true};
      if (std::isfinite(dphj) && dphj * (ahi - alo) >= 0.0) ahi = alo;
      alo = aj;
      phi_lo = phj;
    }
    if (std::abs(ahi - alo) < 1e-14 * std::max(1.0, std::abs(alo))) break;
  }
  // Accept the sufficient-decrease point even if curvature never tightened.
  if (phi_lo < f0) return {alo, phi_lo, true};
  return {};
}

LineSearchResult wolfe_search(const LineSearch& ls, double f0, double dphi0,
                              double c1, double c2) {
  constexpr double kAlphaMax = 1e3;
  double a_prev = 0.0, phi_prev = f0;
  double a = 1.0;
  for (int i = 1; i <= 25; ++i) {
    const double pha = ls.phi(a);
    if (pha > f0 + c1 * a * dphi0 || (i > 1 && pha >= phi_prev))
      return wolfe_zoom(ls, f0, dphi0, c1, c2, a_prev, a, phi_prev);
    const double dpha = ls.dphi(a);
    if (std::isfinite(dpha) && std::abs(dpha) <= -c2 * dphi0)
      return {a, pha, true};
    if (std::isfinite(dpha) && dpha >= 0.0)
      return wolfe_zoom(ls, f0, dphi0, c1, c2, a, a_prev, pha);
    a_prev = a;
    phi_prev = pha;
    a = std::min(2.0 * a, kAlphaMax);
    if (a == a_prev) break;
  }
  return {};
}

}  // namespace

BfgsResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad,
    const Eigen::VectorXd& x0, const BfgsOptions& opt) {
  const Eigen::Index n = x0.size();
  require(n > 0, "bfgs_minimize: empty start vector");

  Eigen::VectorXd x = x0;
  double fx = f(x);
  if (!std::isfinite(fx))
    throw NumericalError("bfgs_minimize: objective not finite at start");

  BfgsResult best;
  best.x = x;
  best.f = fx;

  Eigen::VectorXd g = grad(x);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;

  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    best.gradient_norm = gnorm;
    if (gnorm < opt.grad_tol) {
      best.converged = true;
      break;
    }
    if (opt.stop_below >= 0.0 && fx <= opt.stop_below) {
      best.converged = true;
      break;
    }

    Eigen::VectorXd p = -(h_inv * g);
    double dphi0 = g.dot(p);
    if (!(dphi0 < 0.0)) {
      // Curvature information went stale; restart from steepest descent.
      h_inv.setIdentity();
      p = -g;
      dphi0 = g.dot(p);
    }

    LineSearch ls(f, x, p);
    const LineSearchResult step = wolfe_search(ls, fx, dphi0, opt.c1, opt.c2);
    if (!step.ok) {
      best.line_search_failed = true;
      break;
    }

    const Eigen::VectorXd x_new = x + step.alpha * p;
    const double f_new = step.f;
    Eigen::VectorXd g_new = grad(x_new);

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {  // skip the update when curvature is unreliable
      if (first_update) {
        h_inv = (sy / y.dot(y)) * Eigen::MatrixXd::Identity(n, n);
        first_update = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = h_inv * y;
      const double yhy = y.dot(hy);
      h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
      h_inv.noalias() += (rho * rho * yhy + rho) * (s * s.transpose());
    }

    const double decrease = fx - f_new;
    x = std::move(x_new);
    fx = f_new;
    g = std::move(g_new);
    if (fx < best.f) {
      best.f = fx;
      best.x = x;
    }
    best.gradient_norm = g.lpNorm<Eigen::Infinity>();

    if (decrease >= 0.0 && decrease < opt.f_tol) {
      best.converged = true;
      ++iter;
      break;
    }
  }
  best.iterations = iter;
  return best;
}

// ---------------------------------------------------------------------------
// Objective
// ---------------------------------------------------------------------------

ObjectiveContext::ObjectiveContext(const PreparedScenario& ps, double duration,
                                   PropagatorOptions prop)
    : ps_(&ps), duration_(duration), prop_(prop), evaluator_(ps.evaluator()) {
  require(duration > 0.0, "ObjectiveContext: duration must be positive");
}

double ObjectiveContext::fidelity_of_knots(const Eigen::VectorXd& knots) const {
  ControlProtocol protocol(duration_, knots, ps_->scenario.range);
  const Trajectory traj =
      propagate(ps_->model, protocol, ps_->ini, 2, evaluator_, prop_);
  return traj.fidelities[traj.fidelities.size() - 1];
}

double ObjectiveContext::operator()(const Eigen::VectorXd& u) const {
  return 1.0 -
         fidelity_of_knots(from_unconstrained(u, ps_->scenario.range));
}

// ---------------------------------------------------------------------------
// Multi-start optimization
// ---------------------------------------------------------------------------

Eigen::VectorXd ramp_knots(double g1, double g2, int m_points,
                           const RangeScenario& range) {
  Eigen::VectorXd knots(m_points);
  for (int m = 0; m < m_points; ++m) {
    const double s = (m_points == 1)
                         ? 0.5
                         : static_cast<double>(m) / (m_points - 1);
    knots[m] = range.clamp(g1 + s * (g2 - g1));
  }
  return knots;
}

const std::vector<int>& default_m_schedule() {
  static const std::vector<int> schedule{2, 3, 5, 7, 9, 12, 16, 20};
  return schedule;
}

OptimizationOutcome optimize_at(const PreparedScenario& ps, double duration,
                                int m_points, const OptimizeOptions& opt) {
  require(m_points >= 1, "optimize_at: M must be >= 1");
  require(opt.n_restarts >= 0, "optimize_at: n_restarts must be >= 0");
  const RangeScenario& range = ps.scenario.range;

  std::vector<Eigen::VectorXd> starts;
  for (const auto& w : opt.warm_starts) {
    require(w.size() == m_points,
            "optimize_at: warm start length must equal M");
    starts.push_back(w);
  }
  starts.push_back(ramp_knots(ps.scenario.g1, ps.scenario.g2, m_points, range));
  for (int r = 0; r < opt.n_restarts; ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd knots(m_points);
    for (int m = 0; m < m_points; ++m)
      knots[m] = rng.uniform(range.g_min, range.g_max);
    starts.push_back(std::move(knots));
  }

  const ObjectiveContext objective(ps, duration, opt.prop);
  auto obj_fn = [&objective](const Eigen::VectorXd& u) { return objective(u); };
  auto grad_fn = [&obj_fn](const Eigen::VectorXd& u) {
    return gradient_fd(obj_fn, u, 1e-5);
  };

  BfgsOptions bopt;
  bopt.max_iterations = opt.max_iterations;
  bopt.grad_tol = opt.grad_tol;
  bopt.f_tol = opt.f_tol;
  bopt.stop_below = opt.stop_fidelity >= 0.0 ? 1.0 - opt.stop_fidelity : -1.0;

  OptimizationOutcome best;
  best.duration = duration;
  best.m_points = m_points;
  best.best_fidelity = -kInf;
  std::ostringstream failures;
  int n_failed = 0;

  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    ++best.restarts_used;
    try {
      const Eigen::VectorXd u0 = to_unconstrained(starts[idx], range);
      const BfgsResult res = bfgs_minimize(obj_fn, grad_fn, u0, bopt);
      if (1.0 - res.f > best.best_fidelity) {
        // Re-evaluate through the direct fidelity path so the stored value
        // is bit-identical with later re-propagations of the same knots.
        const Eigen::VectorXd knots = from_unconstrained(res.x, range);
        const double fid = objective.fidelity_of_knots(knots);
        if (fid > best.best_fidelity) {
          best.best_fidelity = fid;
          best.knots = knots;
          best.iterations = res.iterations;
          best.gradient_norm = res.gradient_norm;
        }
      }
      if (opt.stop_fidelity >= 0.0 && best.best_fidelity >= opt.stop_fidelity)
        break;
    } catch (const std::exception& e) {
      ++n_failed;
      failures << "start " << idx << ": " << e.what() << "; ";
    }
  }

  if (best.best_fidelity == -kInf)
    throw NumericalError("optimize_at: all " + std::to_string(n_failed) +
                         " starts failed: " + failures.str());
  if (opt.compute_trajectory) {
    ControlProtocol protocol(duration, best.knots, range);
    best.trajectory = propagate(ps.model, protocol, ps.ini,
                                opt.trajectory_samples, ps.evaluator(),
                                opt.prop);
  }
  return best;
}

OptimizationOutcome optimize_at(const Scenario& s, double duration,
                                int m_points, const OptimizeOptions& opt) {
  const PreparedScenario ps = PreparedScenario::prepare(s);
  return optimize_at(ps, duration, m_points, opt);
}

// ---------------------------------------------------------------------------
// M escalation
// ---------------------------------------------------------------------------

namespace {

Eigen::VectorXd resample_knots(const Eigen::VectorXd& knots, double duration,
                               const RangeScenario& range, int m_new) {
  if (knots.size() == m_new) return knots;
  const ControlProtocol p(duration, knots, range);
  Eigen::VectorXd out(m_new);
  for (int m = 0; m < m_new; ++m) {
    const double t = (m_new == 1)
                         ? 0.0
                         : duration * static_cast<double>(m) / (m_new - 1);
    out[m] = p.eval_field(t);
  }
  return out;
}

}  // namespace

EscalationResult escalate_m(const PreparedScenario& ps, double duration,
                            const std::vector<int>& m_schedule, double eps_m,
                            const OptimizeOptions& opt) {
  require(!m_schedule.empty(), "escalate_m: empty schedule");
  for (std::size_t i = 1; i < m_schedule.size(); ++i)
    require(m_schedule[i] > m_schedule[i - 1],
            "escalate_m: schedule must be ascending");
  require(eps_m >= 0.0, "escalate_m: eps_m must be non-negative");

  EscalationResult result;
  result.best_fidelity = -kInf;
  std::vector<Eigen::VectorXd> carries = opt.warm_starts;

  for (const int m : m_schedule) {
    OptimizeOptions local = opt;
    local.compute_trajectory = false;
    local.warm_starts.clear();
    for (const auto& c : carries)
      local.warm_starts.push_back(
          resample_knots(c, duration, ps.scenario.range, m));

    const OptimizationOutcome out = optimize_at(ps, duration, m, local);
    const double previous = result.best_fidelity;
    if (out.best_fidelity > result.best_fidelity) {
      result.best_fidelity = out.best_fidelity;
      result.m_used = m;
      result.best_outcome = out;
      carries.assign(1, out.knots);
    }
    result.rows.push_back({m, result.best_fidelity});

    if (opt.stop_fidelity >= 0.0 &&
        result.best_fidelity >= opt.stop_fidelity)
      break;
    if (previous > -kInf && result.best_fidelity - previous < eps_m) break;
  }

  if (opt.compute_trajectory) {
    ControlProtocol protocol(duration, result.best_outcome.knots,
                             ps.scenario.range);
    result.best_outcome.trajectory =
        propagate(ps.model, protocol, ps.ini, opt.trajectory_samples,
                  ps.evaluator(), opt.prop);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Duration bisection and QSL estimation
// ---------------------------------------------------------------------------

namespace {

struct ProbeResult {
  double fidelity = 0.0;
  int m_used = 0;
  OptimizationOutcome outcome;
};

// Bisect the smallest duration at which `probe` reaches the threshold.
// Evaluated durations warm-start their neighbours.
double bisect_duration(
    const std::function<ProbeResult(double, const std::vector<Eigen::VectorXd>&)>&
        probe,
    double threshold, std::pair<double, double> bracket, double resolution,
    QSLEstimate* details, OptimizationOutcome* best_at_qsl) {
  require(bracket.first > 0.0 && bracket.second > bracket.first,
          "duration bisection: need 0 < t_lo < t_hi");
  require(resolution > 0.0, "duration bisection: resolution must be positive");

  std::map<double, ProbeResult> evaluated;
  auto run = [&](double t) -> const ProbeResult& {
    std::vector<Eigen::VectorXd> warms;
    auto lo_it = evaluated.lower_bound(t);
    if (lo_it != evaluated.end()) warms.push_back(lo_it->second.outcome.knots);
    if (lo_it != evaluated.begin())
      warms.push_back(std::prev(lo_it)->second.outcome.knots);
    return evaluated.emplace(t, probe(t, warms)).first->second;
  };

  double lo = bracket.first, hi = bracket.second;
  const ProbeResult& at_lo = run(lo);
  double result;
  if (at_lo.fidelity >= threshold) {
    result = lo;  // already satisfied at the bracket floor
  } else {
    const ProbeResult& at_hi = run(hi);
    if (at_hi.fidelity < threshold)
      throw BracketError(
          "duration bisection: threshold " + std::to_string(threshold) +
          " not reached at t = " + std::to_string(hi) +
          " (best " + std::to_string(at_hi.fidelity) +
          "); widen the bracket");
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      if (run(mid).fidelity >= threshold)
        hi = mid;
      else
        lo = mid;
    }
    result = hi;
  }

  if (details) {
    details->t_qsl = result;
    details->threshold = threshold;
    details->resolution = resolution;
    details->scan.clear();
    for (const auto& [t, r] : evaluated)
      details->scan.push_back({t, r.fidelity, r.m_used});
  }
  if (best_at_qsl) *best_at_qsl = evaluated.at(result).outcome;
  return result;
}

}  // namespace

double min_duration_for(const PreparedScenario& ps, int m_points,
                        double threshold, std::pair<double, double> t_bracket,
                        double resolution, const OptimizeOptions& opt,
                        QSLEstimate* details) {
  require(threshold > 0.0 && threshold < 1.0,
          "min_duration_for: threshold must be in (0, 1)");
  auto probe = [&](double t,
                   const std::vector<Eigen::VectorXd>& warms) -> ProbeResult {
    OptimizeOptions local = opt;
    local.compute_trajectory = false;
    local.warm_starts = warms;
    local.stop_fidelity = threshold;
    OptimizationOutcome out = optimize_at(ps, t, m_points, local);
    return {out.best_fidelity, m_points, std::move(out)};
  };
  OptimizationOutcome best;
  const double t =
      bisect_duration(probe, threshold, t_bracket, resolution, details, &best);
  if (details) details->outcome_at_qsl = std::move(best);
  return t;
}

QSLEstimate estimate_qsl(const PreparedScenario& ps, double threshold,
                         const std::vector<int>& m_schedule,
                         std::pair<double, double> t_bracket, double resolution,
                         const OptimizeOptions& opt) {
  require(threshold > 0.0 && threshold < 1.0,
          "estimate_qsl: threshold must be in (0, 1)");
  // The escalation stop must resolve improvements well below the distance to
  // the threshold, otherwise M stops growing before the target is certified.
  const double eps_m = std::min(1e-4, std::max(1e-12, 0.1 * (1.0 - threshold)));

  auto probe = [&](double t,
                   const std::vector<Eigen::VectorXd>& warms) -> ProbeResult {
    OptimizeOptions local = opt;
    local.compute_trajectory = false;
    local.warm_starts = warms;
    local.stop_fidelity = threshold;
    EscalationResult esc = escalate_m(ps, t, m_schedule, eps_m, local);
    return {esc.best_fidelity, esc.m_used, std::move(esc.best_outcome)};
  };

  QSLEstimate est;
  OptimizationOutcome best;
  bisect_duration(probe, threshold, t_bracket, resolution, &est, &best);
  est.outcome_at_qsl = std::move(best);
  return est;
}

// ---------------------------------------------------------------------------
// Cutoff re-evaluation
// ---------------------------------------------------------------------------

Trajectory reevaluate_protocol(const Scenario& s,
                               const OptimizationOutcome& outcome,
                               const ModelParams& alternative,
                               const PropagatorOptions& prop, int n_samples) {
  const bool compatible = std::visit(
      [&](const auto& orig) -> bool {
        using T = std::decay_t<decltype(orig)>;
        if (!std::holds_alternative<T>(alternative)) return false;
        const T& alt = std::get<T>(alternative);
        if constexpr (std::is_same_v<T, TwoQubitParams>) {
          return alt.delta == orig.delta;
        } else if constexpr (std::is_same_v<T, FermionModelParams>) {
          return alt.mass_ratio == orig.mass_ratio &&
                 alt.cutoff_c >= orig.cutoff_c;
        } else {
          return alt.base.mass_ratio == orig.base.mass_ratio &&
                 alt.g_spectator == orig.g_spectator &&
                 alt.base.cutoff_c >= orig.base.cutoff_c &&
                 alt.cutoff_k >= orig.cutoff_k;
        }
      },
      s.model);
  if (!compatible)
    throw ValidationError(
        "reevaluate_protocol: alternative params must keep the family and "
        "physical constants and must not shrink any cutoff");

  Scenario alt_scenario = s;
  alt_scenario.model = alternative;
  const PreparedScenario alt = PreparedScenario::prepare(alt_scenario);
  const ControlProtocol protocol(outcome.duration, outcome.knots, s.range);
  return propagate(alt.model, protocol, alt.ini, n_samples, alt.evaluator(),
                   prop);
}

}  // namespace qramp
