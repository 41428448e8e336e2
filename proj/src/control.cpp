// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qramp {

CubicSpline CubicSpline::not_a_knot(Eigen::VectorXd x, Eigen::VectorXd y) {
  const Eigen::Index n = x.size();
  if (n < 1 || y.size() != n)
    throw ValidationError("CubicSpline: need matching non-empty x and y");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(x[i] < x[i + 1]))
      throw ValidationError("CubicSpline: x must be strictly increasing");

  CubicSpline s;
  s.x_ = std::move(x);
  s.y_ = std::move(y);
  s.sigma_ = Eigen::VectorXd::Zero(n);
  if (n <= 2) return s;

  if (n == 3) {
    // Not-a-knot with three points degenerates to the parabola; its second
    // derivative is twice the second divided difference.
    const double h0 = s.x_[1] - s.x_[0], h1 = s.x_[2] - s.x_[1];
    const double dd =
        ((s.y_[2] - s.y_[1]) / h1 - (s.y_[1] - s.y_[0]) / h0) / (h0 + h1);
    s.sigma_.setConstant(2.0 * dd);
    return s;
  }

  // Solve for interior second derivatives sigma_1..sigma_{n-2}. The
  // not-a-knot conditions (third derivative continuous at x_1 and x_{n-2})
  // let sigma_0 and sigma_{n-1} be eliminated, leaving a tridiagonal system.
  const Eigen::Index m = n - 2;
  Eigen::VectorXd h(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i) h[i] = s.x_[i + 1] - s.x_[i];

  Eigen::VectorXd lower(m), diag(m), upper(m), rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Eigen::Index i = r + 1;  // knot index
    lower[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    upper[r] = h[i];
    rhs[r] = 6.0 * ((s.y_[i + 1] - s.y_[i]) / h[i] -
                    (s.y_[i] - s.y_[i - 1]) / h[i - 1]);
  }
  // sigma_0 = sigma_1 - h0 (sigma_2 - sigma_1) / h1
  diag[0] += lower[0] * (1.0 + h[0] / h[1]);
  upper[0] -= lower[0] * h[0] / h[1];
  // sigma_{n-1} = sigma_{n-2} + h_{n-2} (sigma_{n-2} - sigma_{n-3}) / h_{n-3}
  diag[m - 1] += upper[m - 1] * (1.0 + h[n - 2] / h[n - 3]);
  lower[m - 1] -= upper[m - 1] * h[n - 2] / h[n - 3];

  // Thomas algorithm.
  for (Eigen::Index r = 1; r < m; ++r) {
    const double w = lower[r] / diag[r - 1];
    diag[r] -= w * upper[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  s.sigma_[m] = rhs[m - 1] / diag[m - 1];
  for (Eigen::Index r = m - 2; r >= 0; --r)
    s.sigma_[r + 1] = (rhs[r] - upper[r] * s.sigma_[r + 2]) / diag[r];

  s.sigma_[0] =
      s.sigma_[1] - h[0] * (s.sigma_[2] - s.sigma_[1]) / h[1];
  s.sigma_[n - 1] = s.sigma_[n - 2] +
                    h[n - 2] * (s.sigma_[n - 2] - s.sigma_[n - 3]) / h[n - 3];
  return s;
}

double CubicSpline::operator()(double t) const {
  const Eigen::Index n = x_.size();
  if (n == 1) return y_[0];

  Eigen::Index i = std::upper_bound(x_.data(), x_.data() + n, t) - x_.data();
  i = std::clamp<Eigen::Index>(i - 1, 0, n - 2);

  const double h = x_[i + 1] - x_[i];
  const double a = x_[i + 1] - t, b = t - x_[i];
  return (sigma_[i] * a * a * a + sigma_[i + 1] * b * b * b) / (6.0 * h) +
         (y_[i] / h - sigma_[i] * h / 6.0) * a +
         (y_[i + 1] / h - sigma_[i + 1] * h / 6.0) * b;
}

ControlProtocol::ControlProtocol(double duration, Eigen::VectorXd knots,
                                 RangeScenario range)
    : ControlProtocol(duration, std::move(knots), range, true) {}

ControlProtocol ControlProtocol::with_unchecked_knots(double duration,
                                                      Eigen::VectorXd knots,
                                                      RangeScenario range) {
  return ControlProtocol(duration, std::move(knots), range, false);
}

ControlProtocol::ControlProtocol(double duration, Eigen::VectorXd knots,
                                 RangeScenario range, bool check_range)
    : duration_(duration), knots_(std::move(knots)), range_(range) {
  if (!(duration_ > 0.0))
    throw ValidationError("ControlProtocol: duration must be positive");
  if (knots_.size() < 1)
    throw ValidationError("ControlProtocol: need at least one knot (M >= 1)");
  if (check_range)
    for (Eigen::Index i = 0; i < knots_.size(); ++i)
      if (!range_.contains(knots_[i]))
        throw ValidationError("ControlProtocol: knot " + std::to_string(i) +
                              " = " + std::to_string(knots_[i]) +
                              " outside [" + std::to_string(range_.g_min) +
                              ", " + std::to_string(range_.g_max) + "]");
  spline_ = CubicSpline::not_a_knot(knot_times(), knots_);
}

Eigen::VectorXd ControlProtocol::knot_times() const {
  const int m = m_points();
  if (m == 1) {
    Eigen::VectorXd t(1);
    t[0] = 0.0;
    return t;
  }
  return Eigen::VectorXd::LinSpaced(m, 0.0, duration_);
}

double ControlProtocol::eval_field(double t) const {
  const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max(1.0, duration_);
  if (t < -slack || t > duration_ + slack)
    throw ValidationError("eval_field: t = " + std::to_string(t) +
                          " outside [0, " + std::to_string(duration_) + "]");
  t = std::clamp(t, 0.0, duration_);
  return range_.clamp(spline_(t));
}

Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& knots,
                                 const RangeScenario& range) {
  const double w = range.width();
  const double lo = range.g_min + 1e-9 * w;
  const double hi = range.g_max - 1e-9 * w;
  Eigen::VectorXd u(knots.size());
  for (Eigen::Index i = 0; i < knots.size(); ++i) {
    const double g = std::clamp(knots[i], lo, hi);
    u[i] = std::atanh(2.0 * (g - range.g_min) / w - 1.0);
  }
  return u;
}

Eigen::VectorXd from_unconstrained(const Eigen::VectorXd& u,
                                   const RangeScenario& range) {
  const double w = range.width();
  Eigen::VectorXd g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    g[i] = range.g_min + 0.5 * w * (1.0 + std::tanh(u[i]));
  return g;
}

}  // namespace qramp
