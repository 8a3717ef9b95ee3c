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

#ifndef NONSTOQ_STATISTICS_HPP
#define NONSTOQ_STATISTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "nonstoq/errors.hpp"

namespace nonstoq {

struct Estimate {
  double mean = 0.0;
  double error = 0.0;
};

namespace detail {

inline double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double standard_error(std::span<const double> x) {
  const auto n = x.size();
  if (n < 2) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

inline std::vector<double> pair_average(std::span<const double> x) {
  std::vector<double> out(x.size() / 2);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 0.5 * (x[2 * k] + x[2 * k + 1]);
  return out;
}

/// Bin means at the coarsest power-of-two bin size that still leaves at
/// least `min_bins` bins (raw series when it is shorter than that).
inline std::vector<double> coarsest_bins(std::span<const double> x, std::size_t min_bins) {
  std::vector<double> bins(x.begin(), x.end());
  while (bins.size() / 2 >= min_bins) bins = pair_average(bins);
  return bins;
}

}  // namespace detail

/// Mean and binning error of a correlated time series. The bin size doubles
/// while at least `min_bins` bins remain; the largest error seen along the
/// way is reported, which is the plateau value once bins decorrelate.
inline Estimate binning_analysis(std::span<const double> series, std::size_t min_bins = 32) {
  if (series.size() < 2)
    throw InsufficientStatisticsError("binning needs at least 2 measurements, got " +
                                      std::to_string(series.size()));
  Estimate est{detail::mean_of(series), detail::standard_error(series)};
  std::vector<double> bins(series.begin(), series.end());
  while (bins.size() / 2 >= min_bins) {
    bins = detail::pair_average(bins);
    est.error = std::max(est.error, detail::standard_error(bins));
  }
  return est;
}

/// Jackknife estimate of fn(<a>, <b>) over binned series a and b.
template <class Fn>
Estimate jackknife(std::span<const double> a, std::span<const double> b, Fn fn,
                   std::size_t min_bins = 32) {
  if (a.size() != b.size()) throw ArgumentError("jackknife series lengths differ");
  if (a.size() < 2)
    throw InsufficientStatisticsError("jackknife needs at least 2 measurements");
  const auto ba = detail::coarsest_bins(a, min_bins);
  const auto bb = detail::coarsest_bins(b, min_bins);
  const auto n = ba.size();
  const double sa = std::accumulate(ba.begin(), ba.end(), 0.0);
  const double sb = std::accumulate(bb.begin(), bb.end(), 0.0);
  const double full = fn(detail::mean_of(a), detail::mean_of(b));
  std::vector<double> jk(n);
  const auto denom = static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) jk[k] = fn((sa - ba[k]) / denom, (sb - bb[k]) / denom);
  const double jmean = detail::mean_of(jk);
  double ss = 0.0;
  for (double v : jk) ss += (v - jmean) * (v - jmean);
  return {full, std::sqrt(ss * denom / static_cast<double>(n))};
}

}  // namespace nonstoq

#endif  // NONSTOQ_STATISTICS_HPP
