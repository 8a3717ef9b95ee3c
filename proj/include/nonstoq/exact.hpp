// Copyright 2026 The nonstoq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact finite-N reference solvers.
//
// spin_symmetric_exact handles the uniform infinite-range model in the
// total-spin basis (N/2 + 1 blocks of size at most N + 1). dense_ed builds
// the full 2^N matrix for any classical part. Both evaluate the fluctuation
// term as an operator function through the eigenbasis of sum sigma^x, so
// they agree to rounding on every model they both accept.

#ifndef NONSTOQ_EXACT_HPP
#define NONSTOQ_EXACT_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/model.hpp"

namespace nonstoq {

struct SpectralResult {
  double m_z = 0.0;
  double m_z_abs = 0.0;
  double m_x = 0.0;
  double energy_per_spin = 0.0;
  double free_energy_per_spin = 0.0;
  /// Number of diagonalized blocks (1 for dense ED).
  int sector_count = 0;
  /// Hilbert space dimension including multiplicities (2^N).
  double dimension = 0.0;
};

inline constexpr int kDenseEdMaxSpins = 12;
inline constexpr int kSignReportMaxSpins = 6;

namespace detail {

struct Level {
  double log_weight;  // log multiplicity
  double energy;
  double m_z;
  double m_z_abs;
  double m_x;
};

inline SpectralResult thermal_average(const std::vector<Level>& levels, double beta, int n) {
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& l : levels) e_min = std::min(e_min, l.energy);
  double log_max = -std::numeric_limits<double>::infinity();
  for (const auto& l : levels) log_max = std::max(log_max, l.log_weight - beta * (l.energy - e_min));
  double z = 0.0, mz = 0.0, mza = 0.0, mx = 0.0, e = 0.0;
  for (const auto& l : levels) {
    const double w = std::exp(l.log_weight - beta * (l.energy - e_min) - log_max);
    z += w;
    mz += w * l.m_z;
    mza += w * l.m_z_abs;
    mx += w * l.m_x;
    e += w * l.energy;
  }
  SpectralResult r;
  r.m_z = mz / z;
  r.m_z_abs = mza / z;
  r.m_x = mx / z;
  r.energy_per_spin = e / z / n;
  const double log_z = std::log(z) + log_max - beta * e_min;
  r.free_energy_per_spin = -log_z / (beta * n);
  return r;
}

inline double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// In-place unnormalized Walsh-Hadamard transform.
inline void walsh_hadamard(std::vector<double>& v) {
  for (std::size_t len = 1; len < v.size(); len <<= 1)
    for (std::size_t i = 0; i < v.size(); i += len << 1)
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = v[j];
        const double b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
}

/// c(y) such that the operator sum_x g(|x|) |x><x| in the sigma^x product
/// basis has sigma^z-basis entries <z|.|z'> = c(z xor z').
template <class G>
std::vector<double> x_diagonal_kernel(int n, G g) {
  const std::size_t dim = std::size_t{1} << n;
  std::vector<double> v(dim);
  for (std::size_t x = 0; x < dim; ++x) v[x] = g(std::popcount(x));
  walsh_hadamard(v);
  for (auto& c : v) c /= static_cast<double>(dim);
  return v;
}

/// Bit i set means sigma^z_i = -1.
inline std::vector<Spin> spins_of(std::size_t z, int n) {
  std::vector<Spin> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) s[i] = (z >> i) & 1U ? Spin{-1} : Spin{1};
  return s;
}

/// -N f((N - 2k)/N) for Hamming weight k in the sigma^x basis.
inline auto fluctuation_levels(const NonStoqModel& model) {
  const int n = model.n_spins();
  return [&model, n](int k) { return -n * model.fluctuation.eval(static_cast<double>(n - 2 * k) / n); };
}

}  // namespace detail

/// Exact thermal averages of the uniform model
///   H = -h sum sigma^z - J_ir (sum sigma^z)^2 / N - N f(sum sigma^x / N)
/// by total-spin sectors S with multiplicity C(N, N/2-S) - C(N, N/2-S-1).
inline SpectralResult spin_symmetric_exact(double h, double j_ir, const FluctuationSpec& f, double beta,
                                           int n_spins) {
  if (n_spins < 1) throw ArgumentError("n_spins must be >= 1");
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  const int n = n_spins;
  std::vector<detail::Level> levels;
  int sectors = 0;
  double dimension = 0.0;
  // k = N/2 - S runs over 0 .. floor(N/2).
  for (int k = 0; 2 * k <= n; ++k) {
    const double s = 0.5 * n - k;
    const int d = n - 2 * k + 1;
    const double log_mult = detail::log_binomial(n, k) + std::log(static_cast<double>(n - 2 * k + 1) / (n - k + 1));
    dimension += std::exp(log_mult) * d;
    ++sectors;

    Eigen::VectorXd two_sz(d);
    Eigen::MatrixXd two_sx = Eigen::MatrixXd::Zero(d, d);
    for (int a = 0; a < d; ++a) two_sz(a) = 2.0 * (-s + a);
    for (int a = 0; a + 1 < d; ++a) {
      const double m = -s + a;
      const double amp = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
      two_sx(a + 1, a) = amp;
      two_sx(a, a + 1) = amp;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sx_eig(two_sx);
    Eigen::VectorXd fvals(d);
    for (int a = 0; a < d; ++a) fvals(a) = n * f.eval(sx_eig.eigenvalues()(a) / n);
    Eigen::MatrixXd ham = -(sx_eig.eigenvectors() * fvals.asDiagonal() * sx_eig.eigenvectors().transpose());
    for (int a = 0; a < d; ++a) ham(a, a) += -h * two_sz(a) - j_ir * two_sz(a) * two_sz(a) / n;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(ham);
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const Eigen::MatrixXd sx_v = two_sx * v;
    for (int a = 0; a < d; ++a) {
      const auto col = v.col(a);
      const Eigen::ArrayXd p = col.array().square();
      levels.push_back({log_mult, eig.eigenvalues()(a), (p * two_sz.array()).sum() / n,
                        (p * two_sz.array().abs()).sum() / n, col.dot(sx_v.col(a)) / n});
    }
  }
  auto r = detail::thermal_average(levels, beta, n);
  r.sector_count = sectors;
  r.dimension = dimension;
  return r;
}

inline SpectralResult spin_symmetric_exact(const NonStoqModel& model, double beta) {
  if (!model.classical.is_uniform())
    throw ArgumentError("spin_symmetric_exact needs a uniform model (no pair couplings, equal fields)");
  return spin_symmetric_exact(model.classical.fields()[0], model.classical.infinite_range_coupling(),
                              model.fluctuation, beta, model.n_spins());
}

/// Full Hamiltonian in the sigma^z product basis.
inline Eigen::MatrixXd dense_hamiltonian(const NonStoqModel& model) {
  const int n = model.n_spins();
  if (n > kDenseEdMaxSpins)
    throw SizeLimitError("dense ED is limited to N <= " + std::to_string(kDenseEdMaxSpins) + " (got N = " +
                         std::to_string(n) + "); use spin_symmetric_exact for uniform models");
  const std::size_t dim = std::size_t{1} << n;
  const auto kernel = detail::x_diagonal_kernel(n, detail::fluctuation_levels(model));
  Eigen::MatrixXd ham(dim, dim);
  for (std::size_t z = 0; z < dim; ++z) {
    for (std::size_t w = 0; w < dim; ++w) ham(z, w) = kernel[z ^ w];
    ham(z, z) += model.classical.energy(detail::spins_of(z, n));
  }
  return ham;
}

inline SpectralResult dense_ed(const NonStoqModel& model, double beta) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  const int n = model.n_spins();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense_hamiltonian(model));
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd& energies = eig.eigenvalues();
  const auto dim = static_cast<std::size_t>(v.rows());

  Eigen::ArrayXd mz(dim), mza(dim);
  for (std::size_t z = 0; z < dim; ++z) {
    const double m = static_cast<double>(n - 2 * std::popcount(z)) / n;
    mz(z) = m;
    mza(z) = std::abs(m);
  }
  // (sum_i sigma^x_i) v, column by column.
  Eigen::MatrixXd xv = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double* src = v.col(a).data();
    double* dst = xv.col(a).data();
    for (std::size_t z = 0; z < dim; ++z)
      for (int i = 0; i < n; ++i) dst[z] += src[z ^ (std::size_t{1} << i)];
  }

  std::vector<detail::Level> levels;
  levels.reserve(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto col = v.col(a);
    const Eigen::ArrayXd p = col.array().square();
    levels.push_back({0.0, energies(a), (p * mz).sum(), (p * mza).sum(), col.dot(xv.col(a)) / n});
  }
  auto r = detail::thermal_average(levels, beta, n);
  r.sector_count = 1;
  r.dimension = static_cast<double>(dim);
  return r;
}

/// Exact result for any model: total-spin sectors when uniform, dense ED otherwise.
inline SpectralResult exact_thermal(const NonStoqModel& model, double beta) {
  return model.classical.is_uniform() ? spin_symmetric_exact(model, beta) : dense_ed(model, beta);
}

struct StoquasticityReport {
  bool stoquastic = true;
  /// Largest off-diagonal entry in the sigma^z basis and one position of it.
  double max_off_diagonal = 0.0;
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Stoquastic iff every off-diagonal entry in the sigma^z basis is <= tolerance.
inline StoquasticityReport is_stoquastic(const NonStoqModel& model, double tolerance = 1e-12) {
  const int n = model.n_spins();
  if (n > kDenseEdMaxSpins)
    throw SizeLimitError("stoquasticity check is limited to N <= " + std::to_string(kDenseEdMaxSpins));
  // H0 is diagonal, so off-diagonals come only from the fluctuation kernel.
  const auto kernel = detail::x_diagonal_kernel(n, detail::fluctuation_levels(model));
  StoquasticityReport rep;
  rep.max_off_diagonal = -std::numeric_limits<double>::infinity();
  for (std::size_t y = 1; y < kernel.size(); ++y) {
    if (kernel[y] > rep.max_off_diagonal) {
      rep.max_off_diagonal = kernel[y];
      rep.row = 0;
      rep.col = y;
    }
  }
  rep.stoquastic = rep.max_off_diagonal <= tolerance;
  return rep;
}

struct SignReport {
  double min_transfer_entry = 0.0;
  /// Tr(T^tau) / Tr(|T|^tau).
  double average_sign = 1.0;
};

/// Single-slice transfer matrix of the naive Trotter split,
///   T = exp(-(beta/tau) H0) exp((beta/tau) N f(sum sigma^x / N)),
/// in the sigma^z basis.
inline Eigen::MatrixXd naive_transfer_matrix(const NonStoqModel& model, int tau, double beta) {
  const int n = model.n_spins();
  if (n > kSignReportMaxSpins)
    throw SizeLimitError("sign report is limited to N <= " + std::to_string(kSignReportMaxSpins));
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  if (beta < 0.0) throw ArgumentError("beta must be non-negative");
  const double dt = beta / tau;
  const auto kernel = detail::x_diagonal_kernel(
      n, [&](int k) { return std::exp(dt * n * model.fluctuation.eval(static_cast<double>(n - 2 * k) / n)); });
  const std::size_t dim = kernel.size();
  Eigen::MatrixXd t(dim, dim);
  for (std::size_t z = 0; z < dim; ++z) {
    const double d = std::exp(-dt * model.classical.energy(detail::spins_of(z, n)));
    for (std::size_t w = 0; w < dim; ++w) t(z, w) = d * kernel[z ^ w];
  }
  return t;
}

inline SignReport naive_sign_report(const NonStoqModel& model, int tau, double beta) {
  const Eigen::MatrixXd t = naive_transfer_matrix(model, tau, beta);
  const Eigen::MatrixXd t_abs = t.cwiseAbs();
  Eigen::MatrixXd p = t;
  Eigen::MatrixXd p_abs = t_abs;
  for (int k = 1; k < tau; ++k) {
    p = p * t;
    p_abs = p_abs * t_abs;
    // Common rescaling keeps long products finite; the ratio is unchanged.
    const double scale = p_abs.maxCoeff();
    p /= scale;
    p_abs /= scale;
  }
  return {t.minCoeff(), p.trace() / p_abs.trace()};
}

}  // namespace nonstoq

#endif  // NONSTOQ_EXACT_HPP
