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

// Path-integral Monte Carlo at a fixed effective transverse field.
//
// After the Suzuki-Trotter split with tau slices, the sampled weight of a
// path sigma_{i,t} (periodic in t) is
//
//   W(sigma) = exp( -(beta/tau) sum_t H0(sigma_t) + B sum_{i,t} sigma_{i,t} sigma_{i,t+1} ),
//   B = -(1/2) log tanh(beta * field / tau).
//
// The whole fluctuation term has been replaced by one static field shared
// by all slices. A field <= 0 makes B diverge; that case is the classical
// branch, where every site is a single rigid world line.

#ifndef NONSTOQ_PIMC_HPP
#define NONSTOQ_PIMC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/model.hpp"
#include "nonstoq/rng.hpp"
#include "nonstoq/statistics.hpp"

namespace nonstoq {

/// N x tau world-line configuration, stored slice-major.
class PathConfiguration {
 public:
  PathConfiguration() = default;
  PathConfiguration(int n_spins, int tau, Spin initial = 1) : n_(n_spins), tau_(tau) {
    if (n_spins <= 0) throw ArgumentError("n_spins must be positive");
    if (tau < 2 || tau % 2 != 0) throw ArgumentError("tau must be even and >= 2");
    if (initial != 1 && initial != -1) throw ArgumentError("spins are +1 or -1");
    spins_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(tau_), initial);
  }

  int n_spins() const noexcept { return n_; }
  int tau() const noexcept { return tau_; }

  Spin operator()(int i, int t) const noexcept { return spins_[index(i, t)]; }
  void set(int i, int t, Spin s) {
    if (s != 1 && s != -1) throw ArgumentError("spins are +1 or -1");
    spins_[index(i, t)] = s;
  }
  void flip(int i, int t) noexcept { spins_[index(i, t)] = static_cast<Spin>(-spins_[index(i, t)]); }

  std::span<const Spin> slice(int t) const noexcept {
    return {spins_.data() + static_cast<std::size_t>(t) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<Spin> slice(int t) noexcept {
    return {spins_.data() + static_cast<std::size_t>(t) * n_, static_cast<std::size_t>(n_)};
  }
  std::span<const Spin> data() const noexcept { return spins_; }

  long slice_sum(int t) const noexcept {
    const auto s = slice(t);
    return std::accumulate(s.begin(), s.end(), 0L);
  }

  /// sum_{i,t} sigma_{i,t} sigma_{i,t+1}, periodic in t.
  long bond_sum() const noexcept {
    long acc = 0;
    for (int t = 0; t < tau_; ++t) {
      const auto a = slice(t);
      const auto b = slice((t + 1) % tau_);
      for (int i = 0; i < n_; ++i) acc += a[i] * b[i];
    }
    return acc;
  }

  /// Copy slice 0 into every other slice.
  void lock_slices() {
    for (int t = 1; t < tau_; ++t) std::copy(slice(0).begin(), slice(0).end(), slice(t).begin());
  }

  bool slices_locked() const noexcept {
    for (int t = 1; t < tau_; ++t)
      if (!std::equal(slice(0).begin(), slice(0).end(), slice(t).begin())) return false;
    return true;
  }

  bool operator==(const PathConfiguration&) const = default;

 private:
  std::size_t index(int i, int t) const noexcept {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }

  int n_ = 0;
  int tau_ = 0;
  std::vector<Spin> spins_;
};

enum class SweepOrder { sequential, random };

struct MCParams {
  double beta = 1.0;
  int tau = 64;
  long equilibration_sweeps = 1000;
  long measurement_sweeps = 10000;
  std::uint64_t seed = 0;
  long measure_interval = 1;
  SweepOrder order = SweepOrder::sequential;

  void validate() const {
    if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
    if (tau < 2 || tau % 2 != 0) throw ArgumentError("tau must be even and >= 2");
    if (equilibration_sweeps < 0 || measurement_sweeps < 0)
      throw ArgumentError("sweep counts must be non-negative");
    if (measure_interval < 1) throw ArgumentError("measure_interval must be >= 1");
  }
};

struct ObservableRecord {
  Estimate m_x;
  Estimate m_z;
  Estimate m_z_abs;
  /// (1/N) <H0>, averaged over slices.
  Estimate h0_per_spin;
  /// (1/N) <H0> - f(m_x).
  Estimate energy_per_spin;
  double acceptance_rate = 0.0;
  double effective_field = 0.0;
  std::uint64_t seed = 0;
  long equilibration_sweeps = 0;
  long measurement_sweeps = 0;
  double beta = 0.0;
  int tau = 0;
  int n_spins = 0;

  bool operator==(const ObservableRecord& o) const {
    auto eq = [](const Estimate& a, const Estimate& b) { return a.mean == b.mean && a.error == b.error; };
    return eq(m_x, o.m_x) && eq(m_z, o.m_z) && eq(m_z_abs, o.m_z_abs) &&
           eq(h0_per_spin, o.h0_per_spin) && eq(energy_per_spin, o.energy_per_spin) &&
           acceptance_rate == o.acceptance_rate && effective_field == o.effective_field &&
           seed == o.seed && equilibration_sweeps == o.equilibration_sweeps &&
           measurement_sweeps == o.measurement_sweeps && beta == o.beta && tau == o.tau &&
           n_spins == o.n_spins;
  }
};

/// Inter-slice coupling B = -(1/2) log tanh(beta * field / tau).
inline double trotter_coupling(double beta, int tau, double effective_field) {
  if (!(beta > 0.0)) throw ArgumentError("beta must be positive");
  if (tau < 2) throw ArgumentError("tau must be >= 2");
  if (!(effective_field > 0.0))
    throw DegenerateFieldError("effective field " + std::to_string(effective_field) +
                               " <= 0: inter-slice coupling diverges");
  return -0.5 * std::log(std::tanh(beta * effective_field / tau));
}

struct SweepStats {
  long accepted = 0;
  long proposed = 0;
  /// Change of sum_t H0(sigma_t) over the sweep.
  double energy_change = 0.0;
};

namespace detail {

inline bool metropolis_accept(double delta, Rng& rng) {
  return delta <= 0.0 || rng.uniform() < std::exp(-delta);
}

}  // namespace detail

/// One sweep of N*tau single-spin Metropolis proposals on the Trotter action.
/// The acceptance exponent for flipping sigma_{i,t} is
///   (beta/tau) dH0(slice t) + 2 B sigma_{i,t} (sigma_{i,t-1} + sigma_{i,t+1}).
inline SweepStats metropolis_sweep(PathConfiguration& config, const ClassicalIsing& model,
                                   double beta, double coupling, Rng& rng,
                                   SweepOrder order = SweepOrder::sequential) {
  const int n = config.n_spins();
  const int tau = config.tau();
  if (model.n_spins() != n) throw ArgumentError("model and configuration sizes differ");
  const double dtau = beta / tau;
  const bool need_sums = model.infinite_range_coupling() != 0.0;
  std::vector<long> sums(static_cast<std::size_t>(tau), 0);
  if (need_sums)
    for (int t = 0; t < tau; ++t) sums[t] = config.slice_sum(t);

  SweepStats stats;
  auto propose = [&](int i, int t) {
    auto spins = config.slice(t);
    const int s = spins[i];
    const int nb = config(i, (t + tau - 1) % tau) + config(i, (t + 1) % tau);
    const double dh = model.energy_delta(spins, i, sums[t]);
    const double delta = dtau * dh + 2.0 * coupling * s * nb;
    ++stats.proposed;
    if (detail::metropolis_accept(delta, rng)) {
      spins[i] = static_cast<Spin>(-s);
      sums[t] -= 2 * s;
      stats.energy_change += dh;
      ++stats.accepted;
    }
  };

  if (order == SweepOrder::sequential) {
    for (int t = 0; t < tau; ++t)
      for (int i = 0; i < n; ++i) propose(i, t);
  } else {
    const auto total = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(tau);
    for (std::uint64_t k = 0; k < total; ++k) {
      const auto site = rng.below(total);
      propose(static_cast<int>(site % n), static_cast<int>(site / n));
    }
  }
  return stats;
}

inline SweepStats metropolis_sweep(PathConfiguration& config, const NonStoqModel& model, double beta,
                                   double coupling, Rng& rng,
                                   SweepOrder order = SweepOrder::sequential) {
  return metropolis_sweep(config, model.classical, beta, coupling, rng, order);
}

/// Classical branch: every site's world line flips as a unit. The
/// configuration must have locked slices. energy_change counts all slices.
inline SweepStats classical_sweep(PathConfiguration& config, const ClassicalIsing& model, double beta,
                                  Rng& rng, SweepOrder order = SweepOrder::sequential) {
  const int n = config.n_spins();
  const int tau = config.tau();
  long sum = config.slice_sum(0);
  SweepStats stats;
  auto propose = [&](int i) {
    auto spins = config.slice(0);
    const int s = spins[i];
    const double dh = model.energy_delta(spins, i, sum);
    ++stats.proposed;
    if (detail::metropolis_accept(beta * dh, rng)) {
      for (int t = 0; t < tau; ++t) config.flip(i, t);
      sum -= 2 * s;
      stats.energy_change += tau * dh;
      ++stats.accepted;
    }
  };
  if (order == SweepOrder::sequential) {
    for (int i = 0; i < n; ++i) propose(i);
  } else {
    for (int k = 0; k < n; ++k) propose(static_cast<int>(rng.below(static_cast<std::uint64_t>(n))));
  }
  return stats;
}

/// Bond estimator of <(1/N) sum sigma^x>: tanh(a) per aligned neighbour
/// pair in imaginary time, coth(a) per anti-aligned pair, a = beta*field/tau.
inline double measure_mx(const PathConfiguration& config, double beta, double effective_field) {
  if (!(effective_field > 0.0))
    throw DegenerateFieldError("m_x estimator needs a positive effective field");
  const long bonds = static_cast<long>(config.n_spins()) * config.tau();
  const long bond_sum = config.bond_sum();
  const long aligned = (bonds + bond_sum) / 2;
  const double th = std::tanh(beta * effective_field / config.tau());
  return (static_cast<double>(aligned) * th + static_cast<double>(bonds - aligned) / th) /
         static_cast<double>(bonds);
}

inline double measure_mz(const PathConfiguration& config) {
  const auto d = config.data();
  return static_cast<double>(std::accumulate(d.begin(), d.end(), 0L)) / static_cast<double>(d.size());
}

/// Slice average of |sum_i sigma_i| / N, the estimator of <|m_z|>.
inline double measure_mz_abs(const PathConfiguration& config) {
  long acc = 0;
  for (int t = 0; t < config.tau(); ++t) acc += std::labs(config.slice_sum(t));
  return static_cast<double>(acc) / (static_cast<double>(config.n_spins()) * config.tau());
}

/// sum_t H0(sigma_t).
inline double slice_energy_sum(const PathConfiguration& config, const ClassicalIsing& model) {
  double e = 0.0;
  for (int t = 0; t < config.tau(); ++t) e += model.energy(config.slice(t));
  return e;
}

/// (1/N) [ (1/tau) sum_t H0(sigma_t) ] - f(m_x).
inline double measure_energy(const PathConfiguration& config, const NonStoqModel& model,
                             double measured_mx) {
  return slice_energy_sum(config, model.classical) / (config.tau() * static_cast<double>(config.n_spins())) -
         model.fluctuation.eval(measured_mx);
}

/// Single Markov chain with its own generator, running at one effective
/// field at a time. Keeps the configuration between runs, so a caller can
/// change the field and continue from a warm state.
class Chain {
 public:
  Chain(const ClassicalIsing& model, double beta, int tau, std::uint64_t seed,
        SweepOrder order = SweepOrder::sequential)
      : model_(&model), beta_(beta), order_(order), rng_(seed), config_(model.n_spins(), tau) {
    h0_total_ = slice_energy_sum(config_, *model_);
  }

  void set_field(double effective_field) {
    field_ = effective_field;
    classical_ = !(effective_field > 0.0);
    if (classical_) {
      coupling_ = 0.0;
      if (!config_.slices_locked()) {
        config_.lock_slices();
        h0_total_ = slice_energy_sum(config_, *model_);
      }
    } else {
      coupling_ = trotter_coupling(beta_, config_.tau(), effective_field);
    }
  }

  double field() const noexcept { return field_; }
  bool classical() const noexcept { return classical_; }
  double coupling() const noexcept { return coupling_; }
  const PathConfiguration& config() const noexcept { return config_; }

  void sweep() {
    const auto st = classical_ ? classical_sweep(config_, *model_, beta_, rng_, order_)
                               : metropolis_sweep(config_, *model_, beta_, coupling_, rng_, order_);
    accepted_ += st.accepted;
    proposed_ += st.proposed;
    h0_total_ += st.energy_change;
  }

  void resync_energy() { h0_total_ = slice_energy_sum(config_, *model_); }

  /// Exchange configurations with another chain (generators stay put).
  void swap_configuration(Chain& other) noexcept {
    std::swap(config_, other.config_);
    std::swap(h0_total_, other.h0_total_);
  }

  void reset_counters() noexcept { accepted_ = proposed_ = 0; }

  struct Samples {
    std::vector<double> m_x, m_z, m_z_abs, h0;
  };

  void measure(Samples& out) const {
    const double denom = static_cast<double>(config_.n_spins()) * config_.tau();
    out.m_x.push_back(classical_ ? 0.0 : measure_mx(config_, beta_, field_));
    out.m_z.push_back(measure_mz(config_));
    out.m_z_abs.push_back(measure_mz_abs(config_));
    out.h0.push_back(h0_total_ / denom);
  }

  ObservableRecord summarize(const Samples& s, const FluctuationSpec& f) const {
    ObservableRecord r;
    r.m_x = binning_analysis(s.m_x);
    r.m_z = binning_analysis(s.m_z);
    r.m_z_abs = binning_analysis(s.m_z_abs);
    r.h0_per_spin = binning_analysis(s.h0);
    r.energy_per_spin = jackknife(s.h0, s.m_x, [&f](double h0, double mx) { return h0 - f.eval(mx); });
    r.acceptance_rate = proposed_ ? static_cast<double>(accepted_) / static_cast<double>(proposed_) : 0.0;
    r.effective_field = classical_ ? 0.0 : field_;
    r.beta = beta_;
    r.tau = config_.tau();
    r.n_spins = config_.n_spins();
    return r;
  }

  /// Equilibrate, then measure every `interval` sweeps.
  ObservableRecord run(double effective_field, long equilibration, long measurement, long interval,
                       const FluctuationSpec& f) {
    if (measurement / interval < 2)
      throw InsufficientStatisticsError("need at least 2 measurements; got " +
                                        std::to_string(measurement / interval));
    set_field(effective_field);
    for (long s = 0; s < equilibration; ++s) sweep();
    reset_counters();
    resync_energy();
    Samples samples;
    const auto count = static_cast<std::size_t>(measurement / interval);
    for (auto* v : {&samples.m_x, &samples.m_z, &samples.m_z_abs, &samples.h0}) v->reserve(count);
    for (long s = 1; s <= measurement; ++s) {
      sweep();
      if (s % interval == 0) measure(samples);
    }
    auto r = summarize(samples, f);
    r.equilibration_sweeps = equilibration;
    r.measurement_sweeps = measurement;
    return r;
  }

 private:
  const ClassicalIsing* model_;
  double beta_;
  SweepOrder order_;
  Rng rng_;
  PathConfiguration config_;
  double h0_total_ = 0.0;
  double field_ = 0.0;
  double coupling_ = 0.0;
  bool classical_ = true;
  long accepted_ = 0;
  long proposed_ = 0;
};

/// Full run at a fixed effective field. A field <= 0 takes the classical
/// branch and reports m_x = 0. Deterministic in params.seed.
inline ObservableRecord run_fixed_field(const NonStoqModel& model, double effective_field,
                                        const MCParams& params) {
  params.validate();
  if (params.measurement_sweeps / params.measure_interval < 2)
    throw InsufficientStatisticsError("measurement_sweeps / measure_interval must be >= 2");
  Chain chain(model.classical, params.beta, params.tau, params.seed, params.order);
  auto r = chain.run(effective_field, params.equilibration_sweeps, params.measurement_sweeps,
                     params.measure_interval, model.fluctuation);
  r.seed = params.seed;
  return r;
}

/// Metropolis probability of exchanging the configurations of two chains at
/// couplings b_a and b_b with bond sums s_a and s_b. H0 cancels because all
/// chains share beta.
inline double swap_acceptance_probability(double b_a, double b_b, long s_a, long s_b) {
  const double x = (b_a - b_b) * static_cast<double>(s_b - s_a);
  return x >= 0.0 ? 1.0 : std::exp(x);
}

struct ExchangeParams {
  /// Sweeps between swap rounds; 0 disables swaps.
  long swap_interval = 1;
};

struct ExchangeResult {
  std::vector<ObservableRecord> records;
  /// Accepted fraction of swap proposals between ladder slots k and k+1.
  std::vector<double> swap_acceptance;
};

/// Seed of ladder slot k; run_fixed_field with this seed reproduces slot k
/// when swaps are disabled.
inline std::uint64_t ladder_seed(std::uint64_t master, std::size_t slot) {
  return derive_seed(master, slot);
}

inline ExchangeResult replica_exchange_run(const NonStoqModel& model, const std::vector<double>& ladder,
                                           const MCParams& params, const ExchangeParams& exchange = {}) {
  params.validate();
  if (ladder.size() < 2) throw ArgumentError("replica exchange needs a ladder of at least 2 fields");
  if (!std::is_sorted(ladder.begin(), ladder.end()))
    throw ArgumentError("field ladder must be sorted ascending");
  if (ladder.front() <= 0.0) throw ArgumentError("replica exchange fields must be positive");
  if (params.measurement_sweeps / params.measure_interval < 2)
    throw InsufficientStatisticsError("measurement_sweeps / measure_interval must be >= 2");
  if (exchange.swap_interval < 0) throw ArgumentError("swap_interval must be >= 0");

  const std::size_t k = ladder.size();
  std::vector<Chain> chains;
  chains.reserve(k);
  for (std::size_t s = 0; s < k; ++s) {
    chains.emplace_back(model.classical, params.beta, params.tau, ladder_seed(params.seed, s), params.order);
    chains.back().set_field(ladder[s]);
  }
  Rng swap_rng(derive_seed(params.seed, k));
  std::vector<long> attempts(k - 1, 0);
  std::vector<long> accepted(k - 1, 0);
  long round = 0;

  auto swap_round = [&] {
    for (std::size_t a = static_cast<std::size_t>(round % 2); a + 1 < k; a += 2) {
      auto& lo = chains[a];
      auto& hi = chains[a + 1];
      const double p = swap_acceptance_probability(lo.coupling(), hi.coupling(), lo.config().bond_sum(),
                                                   hi.config().bond_sum());
      ++attempts[a];
      if (p >= 1.0 || swap_rng.uniform() < p) {
        lo.swap_configuration(hi);
        ++accepted[a];
      }
    }
    ++round;
  };

  const long total = params.equilibration_sweeps + params.measurement_sweeps;
  std::vector<Chain::Samples> samples(k);
  for (long s = 1; s <= total; ++s) {
    if (s == params.equilibration_sweeps + 1)
      for (auto& c : chains) {
        c.reset_counters();
        c.resync_energy();
      }
    for (auto& c : chains) c.sweep();
    if (exchange.swap_interval > 0 && s % exchange.swap_interval == 0) swap_round();
    const long m = s - params.equilibration_sweeps;
    if (m > 0 && m % params.measure_interval == 0)
      for (std::size_t a = 0; a < k; ++a) chains[a].measure(samples[a]);
  }

  ExchangeResult out;
  for (std::size_t a = 0; a < k; ++a) {
    auto r = chains[a].summarize(samples[a], model.fluctuation);
    r.seed = ladder_seed(params.seed, a);
    r.equilibration_sweeps = params.equilibration_sweeps;
    r.measurement_sweeps = params.measurement_sweeps;
    out.records.push_back(r);
  }
  for (std::size_t a = 0; a + 1 < k; ++a)
    out.swap_acceptance.push_back(attempts[a] ? static_cast<double>(accepted[a]) / attempts[a] : 0.0);
  return out;
}

}  // namespace nonstoq

#endif  // NONSTOQ_PIMC_HPP
