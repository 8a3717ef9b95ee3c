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

// Adaptive transverse field: sample at an effective field, measure m_x,
// move the field towards f'(m_x), repeat until the pair is self-consistent.

#ifndef NONSTOQ_ADAPTIVE_HPP
#define NONSTOQ_ADAPTIVE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/model.hpp"
#include "nonstoq/pimc.hpp"
#include "nonstoq/rng.hpp"

namespace nonstoq {

struct AdaptiveParams {
  double initial_field = 1.0;
  /// field <- (1 - damping) field + damping f'(m_x)
  double damping = 0.5;
  /// Convergence threshold on successive m_x estimates.
  double tolerance = 1e-2;
  int max_outer_iterations = 50;
  /// Fraction of inner.measurement_sweeps spent per iteration before the
  /// loop has settled. The last two iterations always use the full budget.
  double early_fraction = 0.1;
  MCParams inner;

  void validate() const {
    inner.validate();
    if (!(damping > 0.0 && damping <= 1.0)) throw ArgumentError("damping must lie in (0, 1]");
    if (!(tolerance > 0.0)) throw ArgumentError("tolerance must be positive");
    if (max_outer_iterations < 1) throw ArgumentError("max_outer_iterations must be >= 1");
    if (!(early_fraction > 0.0 && early_fraction <= 1.0)) throw ArgumentError("early_fraction must lie in (0, 1]");
  }
};

struct AdaptiveIteration {
  double field = 0.0;
  double m_x = 0.0;
  double m_x_err = 0.0;
  long measurement_sweeps = 0;
};

struct AdaptiveResult {
  ObservableRecord final_record;
  double fixed_point_field = 0.0;
  std::vector<AdaptiveIteration> trace;
  bool converged = false;
};

inline AdaptiveResult adaptive_solve(const NonStoqModel& model, const AdaptiveParams& params) {
  params.validate();
  const auto& f = model.fluctuation;
  const auto& inner = params.inner;
  AdaptiveResult result;

  // Constant f': the field never moves, one ordinary run is the answer.
  if (f.has_constant_derivative()) {
    const double field = f.derivative(0.0);
    result.final_record = run_fixed_field(model, field, inner);
    result.fixed_point_field = field > 0.0 ? field : 0.0;
    result.trace.push_back({result.fixed_point_field, result.final_record.m_x.mean,
                            result.final_record.m_x.error, inner.measurement_sweeps});
    result.converged = true;
    return result;
  }

  if (!(params.initial_field > 0.0)) throw ArgumentError("initial_field must be positive");
  if (inner.measurement_sweeps / inner.measure_interval < 2)
    throw InsufficientStatisticsError("measurement_sweeps / measure_interval must be >= 2");

  const long full = inner.measurement_sweeps;
  const long early = std::max(2 * inner.measure_interval,
                              static_cast<long>(std::llround(params.early_fraction * static_cast<double>(full))));
  const long warm_equilibration = inner.equilibration_sweeps / 10;

  Chain chain(model.classical, inner.beta, inner.tau, inner.seed, inner.order);
  double field = params.initial_field;
  bool settled = false;
  int full_runs = 0;

  for (int it = 0; it < params.max_outer_iterations; ++it) {
    const long meas = settled ? full : early;
    const long equil = it == 0 ? inner.equilibration_sweeps : warm_equilibration;
    auto rec = chain.run(field, equil, meas, inner.measure_interval, f);
    rec.seed = inner.seed;
    const double mx = rec.m_x.mean;
    const double used_field = chain.classical() ? 0.0 : field;
    result.trace.push_back({used_field, mx, rec.m_x.error, meas});
    result.final_record = rec;
    result.fixed_point_field = used_field;

    const auto n = result.trace.size();
    auto step = [&](std::size_t k) { return std::abs(result.trace[k].m_x - result.trace[k - 1].m_x); };
    if (!settled) {
      if (n >= 3 && step(n - 1) <= params.tolerance && step(n - 2) <= params.tolerance) settled = true;
    } else {
      ++full_runs;
      const double residual = std::abs(f.derivative(mx) - used_field);
      if (full_runs >= 2 && step(n - 1) <= params.tolerance &&
          residual <= params.tolerance * std::max(1.0, std::abs(used_field))) {
        result.converged = true;
        break;
      }
    }
    field = (1.0 - params.damping) * field + params.damping * f.derivative(mx);
  }
  return result;
}

/// Sign s that makes m = mean_sigma_x an attracting point of the drift
/// s N f''(m) (m - mean_sigma_x). Zero curvature gives +1 (no drift anyway).
inline int langevin_stabilization_sign(const FluctuationSpec& f, double m) {
  return f.second_derivative(m) > 0.0 ? -1 : 1;
}

/// One Euler-Maruyama step of
///   dm = s N f''(m) (m - <sigma^x>) dt + sqrt(2/beta) dW.
inline double langevin_step(double m, double mean_sigma_x, const FluctuationSpec& f, double dt, double beta,
                            int n_spins, double noise) {
  if (dt < 0.0) throw ArgumentError("dt must be non-negative");
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  const int s = langevin_stabilization_sign(f, m);
  const double drift = s * n_spins * f.second_derivative(m) * (m - mean_sigma_x);
  return m + drift * dt + std::sqrt(2.0 * dt / beta) * noise;
}

struct LangevinParams {
  double initial_m = 0.5;
  double dt = 0.01;
  int steps = 100;
  /// Budget of the short QMC run that estimates <sigma^x> at each step.
  MCParams inner;
};

struct LangevinPoint {
  double m = 0.0;
  double mean_sigma_x = 0.0;
};

/// Relaxes m_x with the Langevin update, estimating <sigma^x> at the field
/// f'(m) with a warm-started chain at every step.
inline std::vector<LangevinPoint> langevin_relax(const NonStoqModel& model, const LangevinParams& params) {
  params.inner.validate();
  if (!(params.dt > 0.0)) throw ArgumentError("dt must be positive");
  Chain chain(model.classical, params.inner.beta, params.inner.tau, params.inner.seed, params.inner.order);
  Rng noise(derive_seed(params.inner.seed, 0x4c414e47));
  std::vector<LangevinPoint> path;
  double m = params.initial_m;
  for (int k = 0; k < params.steps; ++k) {
    const auto rec = chain.run(model.fluctuation.derivative(m), k == 0 ? params.inner.equilibration_sweeps : 0,
                               params.inner.measurement_sweeps, params.inner.measure_interval, model.fluctuation);
    path.push_back({m, rec.m_x.mean});
    m = langevin_step(m, rec.m_x.mean, model.fluctuation, params.dt, params.inner.beta, model.n_spins(),
                      noise.normal());
  }
  return path;
}

}  // namespace nonstoq

#endif  // NONSTOQ_ADAPTIVE_HPP
