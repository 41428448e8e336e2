// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qramp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

// Dormand-Prince 5(4) tableau. Stage 7 is FSAL.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Schroedinger right-hand side on the real representation [Re psi, Im psi].
// The drift spectrum is recentred by `shift`; fidelities are phase invariant
// and the final state gets the phase exp(-i shift t) restored.
struct RealSystem {
  using State = Eigen::MatrixXd;  // dim x 2

  const Eigen::MatrixXd* h0_dense = nullptr;
  Eigen::VectorXd h0_diag;
  const Eigen::MatrixXd* hc = nullptr;
  const ControlProtocol* protocol = nullptr;
  double shift = 0.0;
  Eigen::MatrixXd w;

  void init(Eigen::Index dim) { w.resize(dim, 2); }

  void rhs(double t, const State& y, State& dy) {
    const double g = protocol->eval_field(t);
    w.noalias() = g * ((*hc) * y);
    if (h0_dense)
      w.noalias() += (*h0_dense) * y;
    else
      w += h0_diag.asDiagonal() * y;
    if (shift != 0.0) w -= shift * y;
    dy.col(0) = w.col(1);
    dy.col(1) = -w.col(0);
  }

  static double error_norm(const State& err, const State& y0,
                           const State& y1, double atol, double rtol) {
    const auto sc =
        (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
    return std::sqrt((err.array() / sc).square().sum() /
                     static_cast<double>(err.size()));
  }

  Eigen::VectorXcd to_complex(const State& y, double t) const {
    Eigen::VectorXcd psi(y.rows());
    const Complex phase = std::exp(Complex(0.0, -shift * t));
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      psi[i] = Complex(y(i, 0), y(i, 1)) * phase;
    return psi;
  }

  static State from_state(const StateVector& s) {
    State y(s.dim(), 2);
    y.col(0) = s.amplitudes().real();
    y.col(1) = s.amplitudes().imag();
    return y;
  }
};

// General complex path, used for operators without a real mirror.
struct ComplexSystem {
  using State = Eigen::VectorXcd;

  const Eigen::MatrixXcd* h0 = nullptr;
  const Eigen::MatrixXcd* hc = nullptr;
  const ControlProtocol* protocol = nullptr;
  double shift = 0.0;
  Eigen::VectorXcd w;

  void init(Eigen::Index dim) { w.resize(dim); }

  void rhs(double t, const State& y, State& dy) {
    const double g = protocol->eval_field(t);
    w.noalias() = g * ((*hc) * y);
    w.noalias() += (*h0) * y;
    if (shift != 0.0) w -= shift * y;
    dy = Complex(0.0, -1.0) * w;
  }

  static double error_norm(const State& err, const State& y0,
                           const State& y1, double atol, double rtol) {
    const auto sc =
        (atol + rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array());
    return std::sqrt((err.cwiseAbs().array() / sc).square().sum() /
                     static_cast<double>(err.size()));
  }

  Eigen::VectorXcd to_complex(const State& y, double t) const {
    return y * std::exp(Complex(0.0, -shift * t));
  }

  static State from_state(const StateVector& s) { return s.amplitudes(); }
};

template <class Sys>
Trajectory integrate(Sys sys, const typename Sys::State& y0, double duration,
                     int n_samples, const FidelityEvaluator& fidelity,
                     const PropagatorOptions& opt) {
  using State = typename Sys::State;

  Trajectory out;
  out.times = Eigen::VectorXd::LinSpaced(n_samples, 0.0, duration);
  out.fidelities.resize(n_samples);

  State y = y0;
  State k1(y), k2(y), k3(y), k4(y), k5(y), k6(y), k7(y), ytmp(y), ynew(y),
      yerr(y);

  auto record = [&](int s, const State& state, double t) {
    const Eigen::VectorXcd psi = sys.to_complex(state, t);
    const double drift = std::abs(psi.norm() - 1.0);
    out.norm_drift = std::max(out.norm_drift, drift);
    out.fidelities[s] = fidelity(psi);
    if (s == n_samples - 1) out.final_state = StateVector::normalized(psi);
  };

  double t = 0.0;
  sys.rhs(t, y, k1);

  // Initial step size in the spirit of Hairer's hinit.
  double h;
  {
    const double d0 = std::sqrt(y.cwiseAbs().array().square().sum());
    const double d1 = std::sqrt(k1.cwiseAbs().array().square().sum());
    double h0 = (d0 > 1e-10 && d1 > 1e-10) ? 0.01 * d0 / d1 : 1e-6;
    h0 = std::min(h0, duration);
    ytmp = y + h0 * k1;
    sys.rhs(t + h0, ytmp, k2);
    const double d2 =
        std::sqrt((k2 - k1).cwiseAbs().array().square().sum()) / h0;
    double h1;
    const double dm = std::max(d1, d2);
    h1 = dm > 1e-15 ? std::pow(0.01 / dm, 0.2) : std::max(1e-6, h0 * 1e-3);
    h = std::min({100.0 * h0, h1, duration});
  }

  Trajectory& res = out;
  record(0, y, 0.0);

  for (int s = 1; s < n_samples; ++s) {
    const double t_stop = out.times[s];
    while (t < t_stop) {
      if (res.steps + res.rejected_steps > opt.max_steps)
        throw NumericalError("propagate: step budget exhausted at t = " +
                             std::to_string(t));
      const bool truncated = (t + h >= t_stop);
      const double h_try = truncated ? (t_stop - t) : h;
      if (!(t + h_try > t))
        throw NumericalError("propagate: step size underflow at t = " +
                             std::to_string(t));

      ytmp = y + (h_try * a21) * k1;
      sys.rhs(t + c2 * h_try, ytmp, k2);
      ytmp = y + h_try * (a31 * k1 + a32 * k2);
      sys.rhs(t + c3 * h_try, ytmp, k3);
      ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
      sys.rhs(t + c4 * h_try, ytmp, k4);
      ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      sys.rhs(t + c5 * h_try, ytmp, k5);
      ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                          a65 * k5);
      sys.rhs(t + h_try, ytmp, k6);
      ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      sys.rhs(t + h_try, ynew, k7);
      yerr = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                      e7 * k7);

      const double err = Sys::error_norm(yerr, y, ynew, opt.atol, opt.rtol);
      if (err <= 1.0) {
        t = truncated ? t_stop : (t + h_try);
        y.swap(ynew);
        k1.swap(k7);
        ++res.steps;
        const double factor =
            std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        double h_next = h_try * factor;
        if (truncated) h_next = std::max(h_next, h);
        h = h_next;
      } else {
        ++res.rejected_steps;
        h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
    }
    record(s, y, t_stop);
  }
  return out;
}

// Recentre the spectrum on the initial state's energy: the dominant
// amplitudes then rotate slowly, which both shrinks the step count and keeps
// the integrator's norm dissipation (proportional to the active frequency)
// small. The phase exp(-i shift t) is restored exactly at every sample.
double initial_energy_shift(const ModelInstance& m, const ControlProtocol& p,
                            const StateVector& psi0) {
  const double g0 = p.eval_field(0.0);
  const Eigen::VectorXcd& v = psi0.amplitudes();
  const Complex e = v.dot(m.h0.entries() * v) + g0 * v.dot(m.hc.entries() * v);
  return e.real();
}

bool drift_is_diagonal(const Eigen::MatrixXd& h0) {
  return (h0 - Eigen::MatrixXd(h0.diagonal().asDiagonal()))
             .cwiseAbs()
             .maxCoeff() == 0.0;
}

}  // namespace

FidelityEvaluator make_fidelity_evaluator(const ModelInstance& m,
                                          const StateVector& tar,
                                          FidelityMode mode) {
  if (mode == FidelityMode::pure) {
    require(tar.dim() == m.dim(),
            "make_fidelity_evaluator: target dim must match model dim");
    return [t = tar.amplitudes()](const Eigen::VectorXcd& psi) {
      return std::norm(t.dot(psi));
    };
  }
  require(tar.dim() == m.dim_ab,
          "make_fidelity_evaluator: reduced target must live on the kept "
          "subsystem");
  require(m.dim_ab * m.dim_spectator == m.dim(),
          "make_fidelity_evaluator: inconsistent subsystem dims");
  const Eigen::Index keep = m.dim_ab, trace = m.dim_spectator;
  return [t = tar.amplitudes(), keep, trace](const Eigen::VectorXcd& psi) {
    const double overlap = detail::reduced_overlap(psi, t, keep, trace);
    return overlap * overlap;
  };
}

Trajectory propagate(const ModelInstance& m, const ControlProtocol& p,
                     const StateVector& psi0, int n_samples,
                     const FidelityEvaluator& fidelity,
                     const PropagatorOptions& opt) {
  require(psi0.dim() == m.dim(), "propagate: psi0 dim must match model dim");
  require(n_samples >= 2, "propagate: need n_samples >= 2");
  require(static_cast<bool>(fidelity), "propagate: missing evaluator");
  require(opt.rtol > 0.0 && opt.atol > 0.0, "propagate: tolerances positive");

  const double shift = initial_energy_shift(m, p, psi0);

  auto run = [&](const PropagatorOptions& local) -> Trajectory {
    if (m.h0.is_real() && m.hc.is_real()) {
      RealSystem sys;
      const Eigen::MatrixXd& h0 = m.h0.real_entries();
      if (drift_is_diagonal(h0))
        sys.h0_diag = h0.diagonal();
      else
        sys.h0_dense = &h0;
      sys.hc = &m.hc.real_entries();
      sys.protocol = &p;
      sys.shift = shift;
      sys.init(m.dim());
      return integrate(std::move(sys), RealSystem::from_state(psi0),
                       p.duration(), n_samples, fidelity, local);
    }
    ComplexSystem sys;
    sys.h0 = &m.h0.entries();
    sys.hc = &m.hc.entries();
    sys.protocol = &p;
    sys.shift = shift;
    sys.init(m.dim());
    return integrate(std::move(sys), ComplexSystem::from_state(psi0),
                     p.duration(), n_samples, fidelity, local);
  };

  // Norm drift below 1e-8 is part of the trajectory contract. If a run
  // breaches it the integration is repeated at tighter tolerance; the retry
  // ladder is deterministic in the inputs.
  PropagatorOptions local = opt;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const Trajectory traj = run(local);
    if (traj.norm_drift < 1e-8) return traj;
    local.rtol *= 0.1;
    local.atol *= 0.1;
  }
  throw NumericalError(
      "propagate: norm drift above 1e-8 even after tightening tolerances");
}

double final_fidelity(const ModelInstance& m, const ControlProtocol& p,
                      const StateVector& ini, const StateVector& tar,
                      FidelityMode mode, const PropagatorOptions& opt) {
  const FidelityEvaluator ev = make_fidelity_evaluator(m, tar, mode);
  const Trajectory traj = propagate(m, p, ini, 2, ev, opt);
  return traj.fidelities[traj.fidelities.size() - 1];
}

}  // namespace qramp
