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

// Model definitions for Hamiltonians of the form
//
//   H = H0(sigma^z) - N f( (1/N) sum_i sigma^x_i )
//
// where H0 is a classical Ising energy (pair couplings, local fields and an
// optional uniform infinite-range ferromagnetic term) and f is a scalar
// "fluctuation" function of the transverse magnetization. f(m) = Gamma m is
// the ordinary transverse field; f(m) = Gamma m - gamma m^2 / 2 adds the
// antiferromagnetic XX interaction (gamma/2N)(sum sigma^x)^2.
//
// f is assumed to make the marginal weight of m_x vanish for |m_x| -> inf.
// Only the physical range [-1, 1] is ever evaluated or validated here.

#ifndef NONSTOQ_MODEL_HPP
#define NONSTOQ_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nonstoq/errors.hpp"

namespace nonstoq {

using Spin = std::int8_t;

/// Infinite-range coupling that puts the zero-field critical point of the
/// uniform model at Gamma_c = 1 (the term is -J_ir N m_z^2).
inline constexpr double kCalibratedInfiniteRangeCoupling = 0.5;

struct Coupling {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Classical diagonal Hamiltonian
///   H0 = - sum_{pairs} J_ij s_i s_j - sum_i h_i s_i - J_ir N m_z^2,
/// each unordered pair stored once, m_z = (1/N) sum_i s_i.
class ClassicalIsing {
 public:
  ClassicalIsing() = default;

  ClassicalIsing(int n_spins, std::vector<Coupling> couplings, std::vector<double> fields,
                 double infinite_range_coupling = 0.0)
      : n_(n_spins),
        couplings_(std::move(couplings)),
        fields_(std::move(fields)),
        j_ir_(infinite_range_coupling) {
    if (n_ <= 0) throw ArgumentError("n_spins must be positive");
    if (fields_.empty()) fields_.assign(static_cast<std::size_t>(n_), 0.0);
    if (fields_.size() != static_cast<std::size_t>(n_))
      throw ArgumentError("fields vector has length " + std::to_string(fields_.size()) +
                          ", expected " + std::to_string(n_));
    std::set<std::pair<int, int>> seen;
    for (const auto& c : couplings_) {
      if (c.i < 0 || c.i >= n_ || c.j < 0 || c.j >= n_)
        throw ArgumentError("coupling index out of range: (" + std::to_string(c.i) + ", " +
                            std::to_string(c.j) + ")");
      if (c.i == c.j) throw ArgumentError("self coupling on site " + std::to_string(c.i));
      if (!seen.emplace(std::min(c.i, c.j), std::max(c.i, c.j)).second)
        throw ArgumentError("pair (" + std::to_string(c.i) + ", " + std::to_string(c.j) +
                            ") listed more than once");
    }
    build_adjacency();
  }

  /// Uniform infinite-range model -h sum s_i - J_ir N m_z^2.
  static ClassicalIsing infinite_range(int n_spins, double h,
                                       double j_ir = kCalibratedInfiniteRangeCoupling) {
    return ClassicalIsing(n_spins, {}, std::vector<double>(static_cast<std::size_t>(n_spins), h),
                          j_ir);
  }

  int n_spins() const noexcept { return n_; }
  const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
  const std::vector<double>& fields() const noexcept { return fields_; }
  double infinite_range_coupling() const noexcept { return j_ir_; }

  /// True when the model is invariant under site permutations: no pair
  /// couplings and equal fields everywhere.
  bool is_uniform() const noexcept {
    return couplings_.empty() &&
           std::all_of(fields_.begin(), fields_.end(), [&](double h) { return h == fields_[0]; });
  }

  double energy(std::span<const Spin> spins) const {
    check_length(spins);
    double e = 0.0;
    for (const auto& c : couplings_) e -= c.value * spins[c.i] * spins[c.j];
    long total = 0;
    for (int i = 0; i < n_; ++i) {
      e -= fields_[i] * spins[i];
      total += spins[i];
    }
    if (j_ir_ != 0.0) e -= j_ir_ * static_cast<double>(total) * static_cast<double>(total) / n_;
    return e;
  }

  /// Energy change from flipping spin k, given the current sum of all spins
  /// (only read when the infinite-range term is present). O(degree of k).
  double energy_delta(std::span<const Spin> spins, int k, long spin_sum) const noexcept {
    const int s = spins[k];
    double local = fields_[k];
    for (std::size_t a = offsets_[k]; a < offsets_[k + 1]; ++a)
      local += neighbour_values_[a] * spins[neighbours_[a]];
    double delta = 2.0 * s * local;
    if (j_ir_ != 0.0) delta += 4.0 * j_ir_ * (static_cast<double>(s) * spin_sum - 1.0) / n_;
    return delta;
  }

  double energy_delta(std::span<const Spin> spins, int k) const {
    check_length(spins);
    if (k < 0 || k >= n_) throw ArgumentError("flip index " + std::to_string(k) + " out of range");
    const long sum = j_ir_ != 0.0 ? std::accumulate(spins.begin(), spins.end(), 0L) : 0L;
    return energy_delta(spins, k, sum);
  }

 private:
  void check_length(std::span<const Spin> spins) const {
    if (spins.size() != static_cast<std::size_t>(n_))
      throw ArgumentError("spin vector has length " + std::to_string(spins.size()) +
                          ", expected " + std::to_string(n_));
  }

  void build_adjacency() {
    std::vector<std::size_t> degree(static_cast<std::size_t>(n_), 0);
    for (const auto& c : couplings_) {
      ++degree[c.i];
      ++degree[c.j];
    }
    offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    neighbours_.resize(offsets_.back());
    neighbour_values_.resize(offsets_.back());
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& c : couplings_) {
      neighbours_[fill[c.i]] = c.j;
      neighbour_values_[fill[c.i]++] = c.value;
      neighbours_[fill[c.j]] = c.i;
      neighbour_values_[fill[c.j]++] = c.value;
    }
  }

  int n_ = 0;
  std::vector<Coupling> couplings_;
  std::vector<double> fields_;
  double j_ir_ = 0.0;
  // CSR adjacency for local fields.
  std::vector<std::size_t> offsets_;
  std::vector<int> neighbours_;
  std::vector<double> neighbour_values_;
};

inline double classical_energy(const ClassicalIsing& model, std::span<const Spin> spins) {
  return model.energy(spins);
}

inline double energy_delta(const ClassicalIsing& model, std::span<const Spin> spins, int flip_index) {
  return model.energy_delta(spins, flip_index);
}

/// f(m) = Gamma m.
struct Linear {
  double gamma_field = 0.0;
};

/// f(m) = Gamma m - gamma m^2 / 2.
struct LinearQuadratic {
  double gamma_field = 0.0;
  double xx = 0.0;
};

/// f(m) = sum_{k>=1} c_k m^k, coefficients[0] = c_1.
struct Polynomial {
  std::vector<double> coefficients;
  /// Bracket searched when inverting f'.
  double bracket_lo = -8.0;
  double bracket_hi = 8.0;
};

class FluctuationSpec {
 public:
  using Variant = std::variant<Linear, LinearQuadratic, Polynomial>;

  FluctuationSpec() : v_(Linear{}) {}
  FluctuationSpec(Linear l) : v_(l) {}                    // NOLINT
  FluctuationSpec(LinearQuadratic lq) : v_(lq) {}         // NOLINT
  FluctuationSpec(Polynomial p) : v_(std::move(p)) {}     // NOLINT

  static FluctuationSpec linear(double gamma_field) { return Linear{gamma_field}; }
  static FluctuationSpec linear_quadratic(double gamma_field, double xx) {
    return LinearQuadratic{gamma_field, xx};
  }
  static FluctuationSpec polynomial(std::vector<double> c) { return Polynomial{std::move(c)}; }

  const Variant& variant() const noexcept { return v_; }
  bool is_linear() const noexcept { return std::holds_alternative<Linear>(v_); }

  /// True when f' does not depend on m.
  bool has_constant_derivative() const noexcept {
    if (is_linear()) return true;
    if (const auto* lq = std::get_if<LinearQuadratic>(&v_)) return lq->xx == 0.0;
    const auto& c = std::get<Polynomial>(v_).coefficients;
    return std::all_of(c.begin() + std::min<std::size_t>(1, c.size()), c.end(),
                       [](double x) { return x == 0.0; });
  }

  double eval(double m) const {
    return std::visit(
        [m](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Linear>) {
            return f.gamma_field * m;
          } else if constexpr (std::is_same_v<T, LinearQuadratic>) {
            return f.gamma_field * m - 0.5 * f.xx * m * m;
          } else {
            double acc = 0.0;
            for (std::size_t k = f.coefficients.size(); k-- > 0;) acc = (acc + f.coefficients[k]) * m;
            return acc;
          }
        },
        v_);
  }

  double derivative(double m) const {
    return std::visit(
        [m](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Linear>) {
            return f.gamma_field;
          } else if constexpr (std::is_same_v<T, LinearQuadratic>) {
            return f.gamma_field - f.xx * m;
          } else {
            double acc = 0.0;
            for (std::size_t k = f.coefficients.size(); k-- > 0;)
              acc = acc * m + static_cast<double>(k + 1) * f.coefficients[k];
            return acc;
          }
        },
        v_);
  }

  double second_derivative(double m) const {
    return std::visit(
        [m](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Linear>) {
            return 0.0;
          } else if constexpr (std::is_same_v<T, LinearQuadratic>) {
            return -f.xx;
          } else {
            double acc = 0.0;
            for (std::size_t k = f.coefficients.size(); k-- > 1;)
              acc = acc * m + static_cast<double>((k + 1) * k) * f.coefficients[k];
            return acc;
          }
        },
        v_);
  }

  /// The m with f'(m) = y.
  double inverse_derivative(double y) const {
    return std::visit(
        [y](const auto& f) -> double {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, Linear>) {
            throw UnsupportedInverseError("linear fluctuation has a constant derivative; f' has no inverse");
          } else if constexpr (std::is_same_v<T, LinearQuadratic>) {
            if (f.xx == 0.0)
              throw UnsupportedInverseError("gamma = 0: f' is constant and has no inverse");
            return (f.gamma_field - y) / f.xx;
          } else {
            return invert_polynomial_derivative(f, y);
          }
        },
        v_);
  }

  bool has_inverse_derivative() const noexcept { return !has_constant_derivative(); }

  std::string describe() const;

 private:
  static double invert_polynomial_derivative(const Polynomial& p, double y) {
    const FluctuationSpec f(p);
    double lo = p.bracket_lo;
    double hi = p.bracket_hi;
    double g_lo = f.derivative(lo) - y;
    double g_hi = f.derivative(hi) - y;
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    if ((g_lo > 0.0) == (g_hi > 0.0))
      throw UnsupportedInverseError("f'(m) = " + std::to_string(y) + " has no bracketed root in [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
    constexpr double kTolerance = 1e-10;
    while (hi - lo > kTolerance) {
      const double mid = 0.5 * (lo + hi);
      const double g_mid = f.derivative(mid) - y;
      if (g_mid == 0.0) return mid;
      if ((g_mid > 0.0) == (g_lo > 0.0)) {
        lo = mid;
        g_lo = g_mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

  Variant v_;
};

inline std::string FluctuationSpec::describe() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Linear>) {
          return "linear(Gamma=" + std::to_string(f.gamma_field) + ")";
        } else if constexpr (std::is_same_v<T, LinearQuadratic>) {
          return "linear_quadratic(Gamma=" + std::to_string(f.gamma_field) +
                 ", gamma=" + std::to_string(f.xx) + ")";
        } else {
          std::string s = "polynomial(";
          for (std::size_t k = 0; k < f.coefficients.size(); ++k)
            s += (k ? ", " : "") + std::to_string(f.coefficients[k]);
          return s + ")";
        }
      },
      v_);
}

/// H0(sigma) - N f(m_x). Immutable after construction.
struct NonStoqModel {
  ClassicalIsing classical;
  FluctuationSpec fluctuation;

  int n_spins() const noexcept { return classical.n_spins(); }
};

}  // namespace nonstoq

#endif  // NONSTOQ_MODEL_HPP
