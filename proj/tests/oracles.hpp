// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles for the test suites. Each implementation here takes a
// deliberately different route from the production code it checks: explicit
// index loops, wide-window quadrature, dense linear solves, and
// eigendecomposition-based matrix exponentials.
#pragma once

#include <Eigen/Dense>
#include <functional>

namespace qramp::oracle {

/// Partial trace by explicit double loop over kept and traced indices.
Eigen::MatrixXcd brute_partial_trace(const Eigen::VectorXcd& psi,
                                     Eigen::Index dim_keep,
                                     Eigen::Index dim_trace);

/// Contact matrix element by trapezoid quadrature over [-12, 12].
double trapezoid_delta_integral(int i, int k, int j, int l, double mass_a,
                                double mass_b, double step = 1e-4);

/// Orbital normalization integral by trapezoid over [-12, 12].
double trapezoid_orbital_norm(int n, double mass, double step = 1e-3);

/// Not-a-knot spline evaluated through the full dense 4(n-1) coefficient
/// system (interpolation, C1, C2, and third-derivative continuity at the
/// first and last interior knots), solved by pivoted LU. Needs n >= 4.
Eigen::VectorXd dense_spline_eval(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& ts);

/// exp(-i H t) psi via full eigendecomposition.
Eigen::VectorXcd expm_apply(const Eigen::MatrixXcd& h, double t,
                            const Eigen::VectorXcd& psi);

/// Five-point (4th order) central-difference gradient.
Eigen::VectorXd gradient_4point(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& u, double h);

/// <(0,{0,1})| sum_i delta(x - y_i) |(0,{0,1})> for A of mass `mass_a` and
/// unit-mass B fermions, from the first-quantized three-particle wavefunction
/// on a real-space grid (Simpson rule).
double hc_element_brute(double mass_a, double half_width = 8.0,
                        double step = 0.005);

/// The full C=3 contact matrix (9 x 9) from first-quantized three-particle
/// wavefunctions on a grid; validates every sign and mass factor of the
/// second-quantized assembly.
Eigen::MatrixXd hc_matrix_brute_c3(double mass_a, double half_width = 7.0,
                                   double step = 0.02);

}  // namespace qramp::oracle
