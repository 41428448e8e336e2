// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "qramp/models.hpp"

namespace qramp::oracle {

Eigen::MatrixXcd brute_partial_trace(const Eigen::VectorXcd& psi,
                                     Eigen::Index dim_keep,
                                     Eigen::Index dim_trace) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim_keep, dim_keep);
  for (Eigen::Index m = 0; m < dim_keep; ++m)
    for (Eigen::Index n = 0; n < dim_keep; ++n)
      for (Eigen::Index t = 0; t < dim_trace; ++t)
        rho(m, n) +=
            psi[m * dim_trace + t] * std::conj(psi[n * dim_trace + t]);
  return rho;
}

double trapezoid_delta_integral(int i, int k, int j, int l, double mass_a,
                                double mass_b, double step) {
  const double lo = -12.0, hi = 12.0;
  const long n = static_cast<long>((hi - lo) / step);
  double acc = 0.0;
  for (long q = 0; q <= n; ++q) {
    const double x = lo + q * step;
    const double f = ho_orbital(i, mass_a, x) * ho_orbital(k, mass_a, x) *
                     ho_orbital(j, mass_b, x) * ho_orbital(l, mass_b, x);
    acc += (q == 0 || q == n) ? 0.5 * f : f;
  }
  return acc * step;
}

double trapezoid_orbital_norm(int n, double mass, double step) {
  const double lo = -12.0, hi = 12.0;
  const long m = static_cast<long>((hi - lo) / step);
  double acc = 0.0;
  for (long q = 0; q <= m; ++q) {
    const double x = lo + q * step;
    const double f = ho_orbital(n, mass, x);
    acc += ((q == 0 || q == m) ? 0.5 : 1.0) * f * f;
  }
  return acc * step;
}

Eigen::VectorXd dense_spline_eval(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& ts) {
  const Eigen::Index n = x.size();
  if (n < 4) throw std::invalid_argument("dense_spline_eval: need n >= 4");
  const Eigen::Index ni = n - 1;      // intervals
  const Eigen::Index nu = 4 * ni;     // coefficients a,b,c,d per interval
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nu, nu);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
  auto col = [&](Eigen::Index interval, int coeff) {
    return 4 * interval + coeff;
  };

  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < ni; ++i) {  // left interpolation
    A(row, col(i, 0)) = 1.0;
    rhs[row++] = y[i];
  }
  for (Eigen::Index i = 0; i < ni; ++i) {  // right interpolation
    const double h = x[i + 1] - x[i];
    A(row, col(i, 0)) = 1.0;
    A(row, col(i, 1)) = h;
    A(row, col(i, 2)) = h * h;
    A(row, col(i, 3)) = h * h * h;
    rhs[row++] = y[i + 1];
  }
  for (Eigen::Index i = 0; i + 1 < ni; ++i) {  // C1
    const double h = x[i + 1] - x[i];
    A(row, col(i, 1)) = 1.0;
    A(row, col(i, 2)) = 2.0 * h;
    A(row, col(i, 3)) = 3.0 * h * h;
    A(row, col(i + 1, 1)) = -1.0;
    ++row;
  }
  for (Eigen::Index i = 0; i + 1 < ni; ++i) {  // C2
    const double h = x[i + 1] - x[i];
    A(row, col(i, 2)) = 2.0;
    A(row, col(i, 3)) = 6.0 * h;
    A(row, col(i + 1, 2)) = -2.0;
    ++row;
  }
  A(row, col(0, 3)) = 1.0;  // not-a-knot at the first interior knot
  A(row, col(1, 3)) = -1.0;
  ++row;
  A(row, col(ni - 2, 3)) = 1.0;  // and the last
  A(row, col(ni - 1, 3)) = -1.0;
  ++row;

  const Eigen::VectorXd c = A.fullPivLu().solve(rhs);

  Eigen::VectorXd out(ts.size());
  for (Eigen::Index q = 0; q < ts.size(); ++q) {
    const double t = ts[q];
    Eigen::Index i = 0;
    while (i + 1 < ni && t > x[i + 1]) ++i;
    const double dt = t - x[i];
    out[q] = c[col(i, 0)] + c[col(i, 1)] * dt + c[col(i, 2)] * dt * dt +
             c[col(i, 3)] * dt * dt * dt;
  }
  return out;
}

Eigen::VectorXcd expm_apply(const Eigen::MatrixXcd& h, double t,
                            const Eigen::VectorXcd& psi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("expm_apply: eigendecomposition failed");
  const Eigen::VectorXcd z = solver.eigenvectors().adjoint() * psi;
  Eigen::VectorXcd rotated(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i)
    rotated[i] =
        z[i] * std::exp(std::complex<double>(0.0, -solver.eigenvalues()[i] * t));
  return solver.eigenvectors() * rotated;
}

Eigen::VectorXd gradient_4point(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& u, double h) {
  Eigen::VectorXd g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    Eigen::VectorXd p = u;
    p[i] = u[i] + 2 * h;
    const double f2p = f(p);
    p[i] = u[i] + h;
    const double f1p = f(p);
    p[i] = u[i] - h;
    const double f1m = f(p);
    p[i] = u[i] - 2 * h;
    const double f2m = f(p);
    g[i] = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h);
  }
  return g;
}

Eigen::MatrixXd hc_matrix_brute_c3(double mass_a, double half_width,
                                   double step) {
  const FockBasis basis = FockBasis::build(3);
  const long n = static_cast<long>(2.0 * half_width / step);
  auto simpson_w = [&](long q) {
    if (q == 0 || q == n) return 1.0;
    return (q % 2 == 1) ? 4.0 : 2.0;
  };

  // Tabulate Phi_cfg(x, x, y) on the grid.
  std::vector<Eigen::MatrixXd> phi(basis.dim());
  for (int idx = 0; idx < basis.dim(); ++idx) {
    const auto& cfg = basis.config(idx);
    phi[idx].resize(n + 1, n + 1);
    for (long qx = 0; qx <= n; ++qx) {
      const double x = -half_width + qx * step;
      const double a = ho_orbital(cfg.a_orbital, mass_a, x);
      const double b0x = ho_orbital(cfg.b_pair[0], 1.0, x);
      const double b1x = ho_orbital(cfg.b_pair[1], 1.0, x);
      for (long qy = 0; qy <= n; ++qy) {
        const double y = -half_width + qy * step;
        const double pair = b0x * ho_orbital(cfg.b_pair[1], 1.0, y) -
                            b1x * ho_orbital(cfg.b_pair[0], 1.0, y);
        phi[idx](qx, qy) = a * pair / std::sqrt(2.0);
      }
    }
  }

  const double w = step / 3.0;
  Eigen::MatrixXd out(basis.dim(), basis.dim());
  for (int r = 0; r < basis.dim(); ++r)
    for (int c = r; c < basis.dim(); ++c) {
      double acc = 0.0;
      for (long qx = 0; qx <= n; ++qx) {
        double inner = 0.0;
        for (long qy = 0; qy <= n; ++qy)
          inner += simpson_w(qy) * phi[r](qx, qy) * phi[c](qx, qy);
        acc += simpson_w(qx) * inner;
      }
      out(r, c) = out(c, r) = 2.0 * acc * w * w;
    }
  return out;
}

double hc_element_brute(double mass_a, double half_width, double step) {
  // Phi(x, y1, y2) = psiA_0(x) [psi_0(y1) psi_1(y2) - psi_1(y1) psi_0(y2)]
  //                  / sqrt(2)
  // <Phi| delta(x-y1) + delta(x-y2) |Phi> = 2 integral dx dy |Phi(x,x,y)|^2.
  const long n = static_cast<long>(2.0 * half_width / step);
  auto simpson_w = [&](long q) {
    if (q == 0 || q == n) return 1.0;
    return (q % 2 == 1) ? 4.0 : 2.0;
  };
  double acc = 0.0;
  for (long qx = 0; qx <= n; ++qx) {
    const double x = -half_width + qx * step;
    const double a0 = ho_orbital(0, mass_a, x);
    const double b0x = ho_orbital(0, 1.0, x);
    const double b1x = ho_orbital(1, 1.0, x);
    double inner = 0.0;
    for (long qy = 0; qy <= n; ++qy) {
      const double y = -half_width + qy * step;
      const double pair =
          b0x * ho_orbital(1, 1.0, y) - b1x * ho_orbital(0, 1.0, y);
      inner += simpson_w(qy) * pair * pair;
    }
    acc += simpson_w(qx) * a0 * a0 * 0.5 * inner;
  }
  const double w = step / 3.0;
  return 2.0 * acc * w * w;
}

}  // namespace qramp::oracle
