// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "qramp/errors.hpp"

namespace qramp {

/// Experimentally accessible interval [g_min, g_max] for the control field.
struct RangeScenario {
  double g_min;
  double g_max;

  RangeScenario(double lo, double hi) : g_min(lo), g_max(hi) {
    if (!(g_min < g_max))
      throw ValidationError("RangeScenario: g_min must be below g_max");
  }

  double width() const { return g_max - g_min; }
  double clamp(double g) const {
    return g < g_min ? g_min : (g > g_max ? g_max : g);
  }
  bool contains(double g) const { return g >= g_min && g <= g_max; }
};

/// Interpolating cubic spline with not-a-knot end conditions. One point gives
/// a constant, two a line, three the interpolating parabola.
class CubicSpline {
 public:
  static CubicSpline not_a_knot(Eigen::VectorXd x, Eigen::VectorXd y);

  double operator()(double t) const;

  const Eigen::VectorXd& second_derivatives() const { return sigma_; }

 private:
  Eigen::VectorXd x_, y_, sigma_;
};

/// Bounded control ramp: M knot values at equally spaced times in [0, T]
/// (endpoints included), interpolated by the not-a-knot spline and hard
/// clamped to the accessible range at evaluation.
class ControlProtocol {
 public:
  /// Knots must lie inside [g_min, g_max].
  ControlProtocol(double duration, Eigen::VectorXd knots, RangeScenario range);

  /// Noise studies perturb knots beyond the range; the evaluated field is
  /// still clamped. Skips the knot range check only.
  static ControlProtocol with_unchecked_knots(double duration,
                                              Eigen::VectorXd knots,
                                              RangeScenario range);

  /// g(t) for t in [0, T].
  double eval_field(double t) const;

  double duration() const { return duration_; }
  int m_points() const { return static_cast<int>(knots_.size()); }
  const Eigen::VectorXd& knots() const { return knots_; }
  const RangeScenario& range() const { return range_; }
  Eigen::VectorXd knot_times() const;

 private:
  ControlProtocol(double duration, Eigen::VectorXd knots, RangeScenario range,
                  bool check_range);

  double duration_;
  Eigen::VectorXd knots_;
  RangeScenario range_;
  CubicSpline spline_;
};

/// Bijection between knot values in the open range and unconstrained
/// optimizer coordinates: g = g_min + (g_max - g_min) (1 + tanh u) / 2.
/// Knots are first pulled inward by 1e-9 * width so atanh stays finite.
Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& knots,
                                 const RangeScenario& range);
Eigen::VectorXd from_unconstrained(const Eigen::VectorXd& u,
                                   const RangeScenario& range);

}  // namespace qramp
