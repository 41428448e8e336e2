// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qramp/core.hpp"

namespace qramp {

/// Two coupled qubits; hbar = Delta = 1, time unit hbar/Delta.
struct TwoQubitParams {
  double delta = 1.0;
};

/// Two-component mixture of one A and two B fermions in a 1D harmonic trap;
/// hbar = omega = m_B = 1. cutoff_c is the number of single-particle
/// orbitals per component.
struct FermionModelParams {
  double mass_ratio = 40.0 / 6.0;  // m_A / m_B
  int cutoff_c = 14;
};

/// Two-component mixture plus a distinguishable spectator of mass m_B with
/// fixed coupling G; the spectator keeps cutoff_k orbitals.
struct ThreeComponentParams {
  FermionModelParams base;
  int cutoff_k = 2;
  double g_spectator = 0.0;
};

/// One antisymmetrized configuration: A in orbital a, B pair in ascending
/// orbitals (b0 < b1).
struct FockConfiguration {
  int a_orbital;
  std::array<int, 2> b_pair;
};

/// Ordered two-component basis, dim = C * C(C,2). Ordering is lexicographic
/// with the A orbital slow and the B pair fast; the pair list itself is
/// lexicographic in (b0, b1).
class FockBasis {
 public:
  static FockBasis build(int cutoff_c);

  int cutoff() const { return cutoff_c_; }
  int dim() const { return static_cast<int>(configs_.size()); }
  int pair_count() const { return static_cast<int>(pairs_.size()); }

  const FockConfiguration& config(int index) const { return configs_[index]; }
  int index_of(int a_orbital, int b0, int b1) const;
  int pair_index(int b0, int b1) const;

  /// Apply b_j^dag b_l to the pair |p0 p1>. Returns {pair index, sign} or
  /// nullopt when the result vanishes. Sign convention: annihilation picks up
  /// (-1)^(position of l in the ascending pair).
  std::optional<std::pair<int, int>> one_body_b(int j, int l, int p0,
                                                int p1) const;

 private:
  int cutoff_c_ = 0;
  std::vector<FockConfiguration> configs_;
  std::vector<std::array<int, 2>> pairs_;
  Eigen::MatrixXi pair_lookup_;
};

/// Drift/control pair over a concrete basis. For the three-component family
/// dim = dim_ab * dim_spectator with the spectator index fastest, and
/// `subsystem` holds the embedded two-component model.
struct ModelInstance {
  HermitianOperator h0;
  HermitianOperator hc;
  std::string family;  // "two_qubit" | "two_component" | "three_component"
  Eigen::Index dim_ab = 0;
  Eigen::Index dim_spectator = 1;
  std::shared_ptr<const ModelInstance> subsystem;

  Eigen::Index dim() const { return h0.dim(); }
  HermitianOperator hamiltonian_at(double g) const;
};

/// n-th harmonic-oscillator eigenfunction for particle mass m (units
/// m_B = hbar = omega = 1), psi_n(x) = m^(1/4) h_n(sqrt(m) x), evaluated by
/// the stable three-term recurrence. Requires n < 200.
double ho_orbital(int n, double mass, double x);

/// Contact matrix element  integral psi^a_i psi^a_k psi^b_j psi^b_l dx  by
/// Gauss-Hermite quadrature on the combined weight exp(-(ma+mb) x^2).
/// Exactly zero when i+k+j+l is odd (parity selection rule).
double delta_integral(int i, int k, int j, int l, double mass_a,
                      double mass_b);

/// Dense table of delta integrals, (i,k) over na orbitals of mass_a and
/// (j,l) over nb orbitals of mass_b.
class IntegralTable {
 public:
  static IntegralTable compute(double mass_a, double mass_b, int na, int nb);

  /// Loads from `<dir>/delta_<key>.json` when present and checksum-valid,
  /// otherwise computes and writes the cache file.
  static IntegralTable load_or_compute(const std::filesystem::path& cache_dir,
                                       double mass_a, double mass_b, int na,
                                       int nb);

  double value(int i, int k, int j, int l) const {
    return values_[((static_cast<std::size_t>(i) * na_ + k) * nb_ + j) * nb_ +
                   l];
  }
  double mass_a() const { return mass_a_; }
  double mass_b() const { return mass_b_; }
  int na() const { return na_; }
  int nb() const { return nb_; }

 private:
  double mass_a_ = 0.0, mass_b_ = 0.0;
  int na_ = 0, nb_ = 0;
  std::vector<double> values_;
};

ModelInstance build_two_qubit(const TwoQubitParams& p);
ModelInstance build_two_component(const FermionModelParams& p);
ModelInstance build_three_component(const ThreeComponentParams& p);

/// Ground states of H(g1) and H(g2). For the three-component family the
/// initial state is the two-component ground state with the spectator in its
/// lowest orbital, and the target is the two-component target.
std::pair<StateVector, StateVector> make_scenario_states(
    const ModelInstance& m, double g1, double g2);

/// Product state with the spectator in the given oscillator orbital,
/// spectator index fastest.
StateVector embed_with_spectator(const StateVector& ab, int k, int orbital);

/// Directory used for delta-integral caches when model builders are invoked
/// with caching enabled (empty = recompute every time).
void set_integral_cache_dir(const std::filesystem::path& dir);
const std::filesystem::path& integral_cache_dir();

}  // namespace qramp
