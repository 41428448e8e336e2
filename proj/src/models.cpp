// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#include "qramp/models.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

namespace qramp {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

constexpr int kMaxOrbital = 200;

// ---------------------------------------------------------------------------
// Gauss-Hermite nodes (weight exp(-x^2)) via the Golub-Welsch tridiagonal.
// ---------------------------------------------------------------------------

struct GaussHermite {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

const GaussHermite& gauss_hermite(int n) {
  static std::map<int, GaussHermite> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double b = std::sqrt(0.5 * (i + 1));
    jacobi(i, i + 1) = b;
    jacobi(i + 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw NumericalError("gauss_hermite: Golub-Welsch eigensolve failed");
  GaussHermite gh;
  gh.nodes = solver.eigenvalues();
  gh.weights.resize(n);
  const double sqrt_pi = std::sqrt(M_PI);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    gh.weights[i] = sqrt_pi * v0 * v0;
  }
  return cache.emplace(n, std::move(gh)).first->second;
}

// Normalized Hermite polynomials Ht_n(y) = H_n(y) / sqrt(2^n n! sqrt(pi)),
// i.e. the oscillator eigenfunctions with the Gaussian factor removed.
void hermite_normalized_row(int n_max, double y, double* out) {
  out[0] = std::pow(M_PI, -0.25);
  if (n_max == 0) return;
  out[1] = std::sqrt(2.0) * y * out[0];
  for (int n = 2; n <= n_max; ++n)
    out[n] = std::sqrt(2.0 / n) * y * out[n - 1] -
             std::sqrt((n - 1.0) / n) * out[n - 2];
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ULL;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::filesystem::path g_integral_cache_dir;

}  // namespace

void set_integral_cache_dir(const std::filesystem::path& dir) {
  g_integral_cache_dir = dir;
}

const std::filesystem::path& integral_cache_dir() {
  return g_integral_cache_dir;
}

double ho_orbital(int n, double mass, double x) {
  require(n >= 0 && n < kMaxOrbital,
          "ho_orbital: n must be in [0, 200) for recurrence stability");
  require(mass > 0.0, "ho_orbital: mass must be positive");
  const double xi = std::sqrt(mass) * x;
  // Recurrence on h_n with the Gaussian included keeps values bounded.
  double hm2 = std::pow(M_PI, -0.25) * std::exp(-0.5 * xi * xi);
  if (n == 0) return std::pow(mass, 0.25) * hm2;
  double hm1 = std::sqrt(2.0) * xi * hm2;
  for (int m = 2; m <= n; ++m) {
    const double h = std::sqrt(2.0 / m) * xi * hm1 -
                     std::sqrt((m - 1.0) / m) * hm2;
    hm2 = hm1;
    hm1 = h;
  }
  return std::pow(mass, 0.25) * hm1;
}

double delta_integral(int i, int k, int j, int l, double mass_a,
                      double mass_b) {
  require(i >= 0 && k >= 0 && j >= 0 && l >= 0, "delta_integral: bad index");
  require(i < kMaxOrbital && k < kMaxOrbital && j < kMaxOrbital &&
              l < kMaxOrbital,
          "delta_integral: index must be below 200");
  require(mass_a > 0.0 && mass_b > 0.0, "delta_integral: masses positive");
  if ((i + k + j + l) % 2 != 0) return 0.0;  // parity selection rule

  const int degree = i + k + j + l;
  const GaussHermite& gh = gauss_hermite(degree + 8);
  const double msum = mass_a + mass_b;
  const double alpha = std::sqrt(mass_a / msum);
  const double beta = std::sqrt(mass_b / msum);
  const int n_max = std::max(std::max(i, k), std::max(j, l));

  std::vector<double> pa(n_max + 1), pb(n_max + 1);
  double acc = 0.0;
  for (Eigen::Index q = 0; q < gh.nodes.size(); ++q) {
    const double u = gh.nodes[q];
    hermite_normalized_row(n_max, alpha * u, pa.data());
    hermite_normalized_row(n_max, beta * u, pb.data());
    acc += gh.weights[q] * pa[i] * pa[k] * pb[j] * pb[l];
  }
  return std::sqrt(mass_a * mass_b / msum) * acc;
}

IntegralTable IntegralTable::compute(double mass_a, double mass_b, int na,
                                     int nb) {
  require(na >= 1 && nb >= 1 && na <= kMaxOrbital && nb <= kMaxOrbital,
          "IntegralTable: orbital counts must be in [1, 200]");
  require(mass_a > 0.0 && mass_b > 0.0, "IntegralTable: masses positive");

  IntegralTable t;
  t.mass_a_ = mass_a;
  t.mass_b_ = mass_b;
  t.na_ = na;
  t.nb_ = nb;
  t.values_.assign(static_cast<std::size_t>(na) * na * nb * nb, 0.0);

  const int degree = 2 * (na - 1) + 2 * (nb - 1);
  const GaussHermite& gh = gauss_hermite(degree + 8);
  const double msum = mass_a + mass_b;
  const double alpha = std::sqrt(mass_a / msum);
  const double beta = std::sqrt(mass_b / msum);
  const double scale = std::sqrt(mass_a * mass_b / msum);
  const Eigen::Index nq = gh.nodes.size();

  Eigen::MatrixXd pa(nq, na), pb(nq, nb);
  std::vector<double> row(std::max(na, nb));
  for (Eigen::Index q = 0; q < nq; ++q) {
    hermite_normalized_row(na - 1, alpha * gh.nodes[q], row.data());
    for (int i = 0; i < na; ++i) pa(q, i) = row[i];
    hermite_normalized_row(nb - 1, beta * gh.nodes[q], row.data());
    for (int j = 0; j < nb; ++j) pb(q, j) = row[j];
  }

  auto at = [&](int i, int k, int j, int l) -> double& {
    return t.values_[((static_cast<std::size_t>(i) * na + k) * nb + j) * nb +
                     l];
  };
  for (int i = 0; i < na; ++i)
    for (int k = i; k < na; ++k)
      for (int j = 0; j < nb; ++j)
        for (int l = j; l < nb; ++l) {
          if ((i + k + j + l) % 2 != 0) continue;
          double acc = 0.0;
          for (Eigen::Index q = 0; q < nq; ++q)
            acc += gh.weights[q] * pa(q, i) * pa(q, k) * pb(q, j) * pb(q, l);
          const double v = scale * acc;
          at(i, k, j, l) = v;
          at(k, i, j, l) = v;
          at(i, k, l, j) = v;
          at(k, i, l, j) = v;
        }
  return t;
}

IntegralTable IntegralTable::load_or_compute(
    const std::filesystem::path& cache_dir, double mass_a, double mass_b,
    int na, int nb) {
  if (cache_dir.empty()) return compute(mass_a, mass_b, na, nb);

  std::ostringstream key;
  key.precision(17);
  key << "delta_ma" << mass_a << "_mb" << mass_b << "_na" << na << "_nb" << nb
      << ".json";
  const std::filesystem::path path = cache_dir / key.str();

  if (std::filesystem::exists(path)) {
    try {
      std::ifstream in(path);
      nlohmann::json doc = nlohmann::json::parse(in);
      if (doc.at("mass_a").get<double>() == mass_a &&
          doc.at("mass_b").get<double>() == mass_b &&
          doc.at("na").get<int>() == na && doc.at("nb").get<int>() == nb) {
        std::vector<double> values =
            doc.at("values").get<std::vector<double>>();
        const std::uint64_t sum =
            fnv1a(values.data(), values.size() * sizeof(double));
        if (doc.at("checksum").get<std::uint64_t>() == sum &&
            values.size() ==
                static_cast<std::size_t>(na) * na * nb * nb) {
          IntegralTable t;
          t.mass_a_ = mass_a;
          t.mass_b_ = mass_b;
          t.na_ = na;
          t.nb_ = nb;
          t.values_ = std::move(values);
          return t;
        }
      }
    } catch (const std::exception&) {
      // fall through: stale or corrupt cache is regenerated below
    }
  }

  IntegralTable t = compute(mass_a, mass_b, na, nb);
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  nlohmann::json doc;
  doc["mass_a"] = mass_a;
  doc["mass_b"] = mass_b;
  doc["na"] = na;
  doc["nb"] = nb;
  doc["values"] = t.values_;
  doc["checksum"] = fnv1a(t.values_.data(), t.values_.size() * sizeof(double));
  std::ofstream out(path);
  out << doc.dump();
  return t;
}

// ---------------------------------------------------------------------------
// Fock basis
// ---------------------------------------------------------------------------

FockBasis FockBasis::build(int cutoff_c) {
  require(cutoff_c >= 2,
          "FockBasis: cutoff C must be >= 2 (two B fermions need two orbitals)");
  require(cutoff_c <= kMaxOrbital, "FockBasis: cutoff too large");
  FockBasis b;
  b.cutoff_c_ = cutoff_c;
  b.pair_lookup_ = Eigen::MatrixXi::Constant(cutoff_c, cutoff_c, -1);
  for (int p0 = 0; p0 < cutoff_c; ++p0)
    for (int p1 = p0 + 1; p1 < cutoff_c; ++p1) {
      b.pair_lookup_(p0, p1) = static_cast<int>(b.pairs_.size());
      b.pairs_.push_back({p0, p1});
    }
  b.configs_.reserve(static_cast<std::size_t>(cutoff_c) * b.pairs_.size());
  for (int a = 0; a < cutoff_c; ++a)
    for (const auto& pair : b.pairs_) b.configs_.push_back({a, pair});
  return b;
}

int FockBasis::pair_index(int b0, int b1) const {
  require(b0 >= 0 && b1 > b0 && b1 < cutoff_c_, "FockBasis: bad pair");
  return pair_lookup_(b0, b1);
}

int FockBasis::index_of(int a_orbital, int b0, int b1) const {
  require(a_orbital >= 0 && a_orbital < cutoff_c_, "FockBasis: bad A orbital");
  return a_orbital * pair_count() + pair_index(b0, b1);
}

std::optional<std::pair<int, int>> FockBasis::one_body_b(int j, int l, int p0,
                                                         int p1) const {
  // b_l on |p0 p1>: +|p1> if l == p0, -|p0> if l == p1, else vanishes.
  int remaining, sign;
  if (l == p0) {
    remaining = p1;
    sign = +1;
  } else if (l == p1) {
    remaining = p0;
    sign = -1;
  } else {
    return std::nullopt;
  }
  if (j == remaining) return std::nullopt;  // Pauli blocked
  if (j >= cutoff_c_) return std::nullopt;
  if (j < remaining) return std::make_pair(pair_index(j, remaining), sign);
  return std::make_pair(pair_index(remaining, j), -sign);
}

// ---------------------------------------------------------------------------
// Model builders
// ---------------------------------------------------------------------------

HermitianOperator ModelInstance::hamiltonian_at(double g) const {
  if (h0.is_real() && hc.is_real())
    return HermitianOperator::from_real(h0.real_entries() +
                                        g * hc.real_entries());
  return HermitianOperator(h0.entries() + g * hc.entries());
}

ModelInstance build_two_qubit(const TwoQubitParams& p) {
  require(p.delta > 0.0, "build_two_qubit: delta must be positive");
  Eigen::Matrix2d sx, sz, id;
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  id.setIdentity();

  auto kron2 = [](const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
    Eigen::Matrix4d out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };

  const double c = p.delta / (2.0 * std::sqrt(2.0));
  Eigen::MatrixXd h0 = -c * (kron2(sx, id) + kron2(id, sx) + kron2(sz, id) +
                             kron2(id, sz));
  Eigen::MatrixXd hc = -p.delta * kron2(sz, sz);

  ModelInstance m{HermitianOperator::from_real(std::move(h0)),
                  HermitianOperator::from_real(std::move(hc)),
                  "two_qubit",
                  4,
                  1,
                  nullptr};
  return m;
}

ModelInstance build_two_component(const FermionModelParams& p) {
  require(p.mass_ratio > 0.0, "build_two_component: mass_ratio positive");
  const FockBasis basis = FockBasis::build(p.cutoff_c);
  const int dim = basis.dim();
  const int c = p.cutoff_c;

  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(dim, dim);
  for (int idx = 0; idx < dim; ++idx) {
    const auto& cfg = basis.config(idx);
    h0(idx, idx) = (cfg.a_orbital + 0.5) + (cfg.b_pair[0] + 0.5) +
                   (cfg.b_pair[1] + 0.5);
  }

  const IntegralTable table = IntegralTable::load_or_compute(
      integral_cache_dir(), p.mass_ratio, 1.0, c, c);

  // H_c = sum_{ikjl} I(i,k;j,l) a_i^dag a_k b_j^dag b_l. With one A particle
  // the A factor connects |a_col> to any |i>, so each column scatters over
  // all B one-body transitions and all target A orbitals.
  Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const auto& cfg = basis.config(col);
    const int a_col = cfg.a_orbital;
    for (int j = 0; j < c; ++j)
      for (int l = 0; l < c; ++l) {
        const auto hop = basis.one_body_b(j, l, cfg.b_pair[0], cfg.b_pair[1]);
        if (!hop) continue;
        const auto [pair_row, sign] = *hop;
        for (int i = 0; i < c; ++i) {
          const int row = i * basis.pair_count() + pair_row;
          hc(row, col) += sign * table.value(i, a_col, j, l);
        }
      }
  }

  ModelInstance m{HermitianOperator::from_real(std::move(h0)),
                  HermitianOperator::from_real(std::move(hc)),
                  "two_component",
                  dim,
                  1,
                  nullptr};
  return m;
}

ModelInstance build_three_component(const ThreeComponentParams& p) {
  require(p.cutoff_k >= 1, "build_three_component: cutoff K must be >= 1");
  require(p.cutoff_k <= kMaxOrbital, "build_three_component: K too large");

  auto sub = std::make_shared<ModelInstance>(build_two_component(p.base));
  const FockBasis basis = FockBasis::build(p.base.cutoff_c);
  const int d2 = static_cast<int>(sub->dim());
  const int k = p.cutoff_k;
  const int c = p.base.cutoff_c;
  const int dim = d2 * k;
  const double g_spec = p.g_spectator;

  const Eigen::MatrixXd& h0_2 = sub->h0.real_entries();
  const Eigen::MatrixXd& hc_2 = sub->hc.real_entries();

  Eigen::MatrixXd h0 = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd hc = Eigen::MatrixXd::Zero(dim, dim);

  // Two-component pieces tensored with identity on the spectator (fast index),
  // plus the spectator's own oscillator energy.
  for (int ab = 0; ab < d2; ++ab)
    for (int q = 0; q < k; ++q)
      h0(ab * k + q, ab * k + q) = h0_2(ab, ab) + (q + 0.5);
  for (int ab_row = 0; ab_row < d2; ++ab_row)
    for (int ab_col = 0; ab_col < d2; ++ab_col) {
      const double v = hc_2(ab_row, ab_col);
      if (v == 0.0) continue;
      for (int q = 0; q < k; ++q) hc(ab_row * k + q, ab_col * k + q) = v;
    }

  if (g_spec != 0.0) {
    const IntegralTable i_ac = IntegralTable::load_or_compute(
        integral_cache_dir(), p.base.mass_ratio, 1.0, c, k);
    const IntegralTable i_bc =
        IntegralTable::load_or_compute(integral_cache_dir(), 1.0, 1.0, c, k);

    for (int col = 0; col < dim; ++col) {
      const int ab_col = col / k;
      const int q = col % k;  // spectator orbital in the column
      const auto& cfg = basis.config(ab_col);

      // G * delta(z - x): one-body in A and in the spectator.
      for (int i = 0; i < c; ++i) {
        const int ab_row = i * basis.pair_count() +
                           basis.pair_index(cfg.b_pair[0], cfg.b_pair[1]);
        for (int pp = 0; pp < k; ++pp)
          h0(ab_row * k + pp, col) +=
              g_spec * i_ac.value(i, cfg.a_orbital, pp, q);
      }
      // G * sum_i delta(z - y_i): one-body in B and in the spectator. The
      // spectator is distinguishable, so no sign couples the species.
      for (int j = 0; j < c; ++j)
        for (int l = 0; l < c; ++l) {
          const auto hop =
              basis.one_body_b(j, l, cfg.b_pair[0], cfg.b_pair[1]);
          if (!hop) continue;
          const auto [pair_row, sign] = *hop;
          const int ab_row = cfg.a_orbital * basis.pair_count() + pair_row;
          for (int pp = 0; pp < k; ++pp)
            h0(ab_row * k + pp, col) +=
                g_spec * sign * i_bc.value(j, l, pp, q);
        }
    }
  }

  ModelInstance m{HermitianOperator::from_real(std::move(h0)),
                  HermitianOperator::from_real(std::move(hc)),
                  "three_component",
                  d2,
                  k,
                  std::move(sub)};
  return m;
}

std::pair<StateVector, StateVector> make_scenario_states(const ModelInstance& m,
                                                         double g1, double g2) {
  if (m.subsystem) {
    auto [e1, ini2] = ground_state(m.subsystem->hamiltonian_at(g1));
    auto [e2, tar2] = ground_state(m.subsystem->hamiltonian_at(g2));
    (void)e1;
    (void)e2;
    StateVector ini = embed_with_spectator(
        ini2, static_cast<int>(m.dim_spectator), 0);
    return {std::move(ini), std::move(tar2)};
  }
  auto [e1, ini] = ground_state(m.hamiltonian_at(g1));
  auto [e2, tar] = ground_state(m.hamiltonian_at(g2));
  (void)e1;
  (void)e2;
  return {std::move(ini), std::move(tar)};
}

StateVector embed_with_spectator(const StateVector& ab, int k, int orbital) {
  require(k >= 1, "embed_with_spectator: k must be >= 1");
  require(orbital >= 0 && orbital < k,
          "embed_with_spectator: orbital index out of range");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(ab.dim() * k);
  for (Eigen::Index i = 0; i < ab.dim(); ++i)
    out[i * k + orbital] = ab.amplitudes()[i];
  return StateVector::from_unit(std::move(out));
}

}  // namespace qramp
