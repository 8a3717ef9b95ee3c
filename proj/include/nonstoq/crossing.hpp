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

// Crossing analysis: the non-stoquastic model at (f, H0) is read off the
// ordinary transverse-field curve m_x(field) where it meets m_x = f'^-1(field).

#ifndef NONSTOQ_CROSSING_HPP
#define NONSTOQ_CROSSING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/model.hpp"
#include "nonstoq/parallel.hpp"
#include "nonstoq/pimc.hpp"
#include "nonstoq/rng.hpp"

namespace nonstoq {

/// Inclusive grid min, min + step, ..., max (within half a step).
struct Grid {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  void validate() const {
    if (!(min >= 0.0)) throw ArgumentError("grid minimum must be >= 0");
    if (!(step > 0.0)) throw ArgumentError("grid step must be positive");
    if (max < min) throw ArgumentError("grid maximum is below its minimum");
  }

  std::size_t size() const { return static_cast<std::size_t>(std::floor((max - min) / step + 0.5)) + 1; }

  std::vector<double> points() const {
    validate();
    std::vector<double> p(size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = min + static_cast<double>(k) * step;
    return p;
  }

  /// "min:max:step"
  static Grid parse(const std::string& text) {
    std::istringstream ss(text);
    Grid g;
    char c1 = 0, c2 = 0;
    if (!(ss >> g.min >> c1 >> g.max >> c2 >> g.step) || c1 != ':' || c2 != ':' || !(ss >> std::ws).eof())
      throw ParseError("grid must look like min:max:step, got '" + text + "'");
    try {
      g.validate();
    } catch (const ArgumentError& e) {
      throw ParseError(e.what());
    }
    return g;
  }
};

struct SweepRow {
  double field = 0.0;
  ObservableRecord record;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  Grid grid;

  /// Table from explicit rows; fields must be strictly increasing.
  static SweepTable from_rows(std::vector<SweepRow> rows) {
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (!(rows[k].field > rows[k - 1].field)) throw ArgumentError("sweep fields must be strictly increasing");
    SweepTable t;
    t.rows = std::move(rows);
    if (!t.rows.empty()) {
      t.grid.min = t.rows.front().field;
      t.grid.max = t.rows.back().field;
      t.grid.step = t.rows.size() > 1 ? (t.grid.max - t.grid.min) / static_cast<double>(t.rows.size() - 1) : 1.0;
    }
    return t;
  }
};

/// Ordinary transverse-field runs (f = Linear(field)) over the grid. Row k
/// uses the sub-seed derive_seed(params.seed, k), so the table does not
/// depend on the worker count.
inline SweepTable sweep_standard(const ClassicalIsing& model, const Grid& grid, const MCParams& params,
                                 int workers = 1) {
  params.validate();
  const auto fields = grid.points();
  auto rows = parallel_map(fields.size(), workers, [&](std::size_t k) {
    MCParams p = params;
    p.seed = derive_seed(params.seed, k);
    const NonStoqModel standard{model, FluctuationSpec::linear(fields[k])};
    try {
      return SweepRow{fields[k], run_fixed_field(standard, fields[k], p)};
    } catch (const NumericalError& e) {
      throw NumericalError("at field " + std::to_string(fields[k]) + ": " + e.what());
    }
  });
  SweepTable t;
  t.rows = std::move(rows);
  t.grid = grid;
  return t;
}

struct Crossing {
  double field = 0.0;
  double m_x = 0.0;
  /// Table record linearly interpolated to `field`.
  ObservableRecord record;
};

enum class SelectionMethod { only_crossing, free_energy, unresolved };

inline const char* to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::only_crossing:
      return "only_crossing";
    case SelectionMethod::free_energy:
      return "free_energy";
    case SelectionMethod::unresolved:
      return "unresolved";
  }
  return "?";
}

struct CrossingResult {
  std::vector<Crossing> crossings;
  std::optional<std::size_t> selected;
  SelectionMethod method = SelectionMethod::unresolved;
  /// Free energy per spin (up to a common constant) of each crossing, when
  /// more than one was found.
  std::vector<double> free_energies;
};

struct CrossingOptions {
  /// Free-energy differences at or below this count as a tie.
  double tie_tolerance = 1e-6;
  /// Merge crossings closer than one grid step.
  bool merge_close = true;
};

namespace detail {

inline Estimate lerp(const Estimate& a, const Estimate& b, double w) {
  return {a.mean + w * (b.mean - a.mean), a.error + w * (b.error - a.error)};
}

inline ObservableRecord lerp(const ObservableRecord& a, const ObservableRecord& b, double w) {
  ObservableRecord r = a;
  r.m_x = lerp(a.m_x, b.m_x, w);
  r.m_z = lerp(a.m_z, b.m_z, w);
  r.m_z_abs = lerp(a.m_z_abs, b.m_z_abs, w);
  r.h0_per_spin = lerp(a.h0_per_spin, b.h0_per_spin, w);
  r.energy_per_spin = lerp(a.energy_per_spin, b.energy_per_spin, w);
  r.acceptance_rate = a.acceptance_rate + w * (b.acceptance_rate - a.acceptance_rate);
  r.effective_field = a.effective_field + w * (b.effective_field - a.effective_field);
  return r;
}

}  // namespace detail

/// Piecewise-linear interpolation of the table at `field`.
inline ObservableRecord interpolate(const SweepTable& table, double field) {
  const auto& rows = table.rows;
  if (rows.empty()) throw ArgumentError("empty sweep table");
  if (field < rows.front().field || field > rows.back().field)
    throw ExtrapolationError("field " + std::to_string(field) + " is outside the table range [" +
                             std::to_string(rows.front().field) + ", " + std::to_string(rows.back().field) + "]");
  if (rows.size() == 1) return rows.front().record;
  auto it = std::upper_bound(rows.begin(), rows.end(), field,
                             [](double x, const SweepRow& r) { return x < r.field; });
  const std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(1, it - rows.begin()), rows.size() - 1);
  const auto& a = rows[hi - 1];
  const auto& b = rows[hi];
  auto r = detail::lerp(a.record, b.record, (field - a.field) / (b.field - a.field));
  r.effective_field = field;
  return r;
}

/// Free energy per spin of the non-stoquastic model at a crossing, relative
/// to the standard model at the largest table field:
///   Phi = -int_{ref}^{field} m_x(u) du + m_x f'(m_x) - f(m_x).
inline double crossing_free_energy(const SweepTable& table, const FluctuationSpec& f, const Crossing& c) {
  const auto& rows = table.rows;
  if (rows.size() < 2) throw ArgumentError("free energy needs at least 2 table rows");
  if (c.field < rows.front().field || c.field > rows.back().field)
    throw ExtrapolationError("crossing at " + std::to_string(c.field) + " lies outside the grid");
  // Exact integral of the piecewise-linear curve from c.field to the top.
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double lo = std::max(rows[k].field, c.field);
    const double hi = rows[k + 1].field;
    if (hi <= lo) continue;
    const double ya = interpolate(table, lo).m_x.mean;
    const double yb = rows[k + 1].record.m_x.mean;
    integral += 0.5 * (ya + yb) * (hi - lo);
  }
  return integral + c.m_x * f.derivative(c.m_x) - f.eval(c.m_x);
}

/// Index of the crossing with the lowest free energy, or nullopt on a tie.
inline std::optional<std::size_t> free_energy_compare(const SweepTable& table, const FluctuationSpec& f,
                                                      const std::vector<Crossing>& crossings,
                                                      double tie_tolerance = 1e-6,
                                                      std::vector<double>* free_energies = nullptr) {
  if (crossings.empty()) throw ArgumentError("no crossings to compare");
  std::vector<double> phi;
  for (const auto& c : crossings) phi.push_back(crossing_free_energy(table, f, c));
  if (free_energies) *free_energies = phi;
  if (crossings.size() == 1) return 0;
  std::vector<std::size_t> order(phi.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return phi[a] < phi[b]; });
  if (phi[order[1]] - phi[order[0]] <= tie_tolerance) return std::nullopt;
  return order[0];
}

inline CrossingResult find_crossings(const SweepTable& table, const FluctuationSpec& f,
                                     const CrossingOptions& options = {}) {
  const auto& rows = table.rows;
  if (rows.size() < 2) throw ArgumentError("crossing analysis needs at least 2 table rows");
  if (!f.has_inverse_derivative())
    throw UnsupportedInverseError("fluctuation " + f.describe() + " has a constant derivative and no f'^-1");

  std::vector<double> g(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k)
    g[k] = rows[k].record.m_x.mean - f.inverse_derivative(rows[k].field);

  std::vector<double> fields;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (g[k] == 0.0) {
      fields.push_back(rows[k].field);
    } else if (k + 1 < rows.size() && g[k + 1] != 0.0 && (g[k] > 0.0) != (g[k + 1] > 0.0)) {
      const double w = g[k] / (g[k] - g[k + 1]);
      fields.push_back(rows[k].field + w * (rows[k + 1].field - rows[k].field));
    }
  }
  if (fields.empty()) {
    std::ostringstream msg;
    msg << "m_x curve does not cross f'^-1 on the grid [" << rows.front().field << ", " << rows.back().field << "]";
    throw NoCrossingError(msg.str());
  }

  auto make = [&](double field) {
    Crossing c;
    c.field = field;
    c.record = interpolate(table, field);
    c.m_x = c.record.m_x.mean;
    return c;
  };

  CrossingResult result;
  const double step = table.grid.step;
  for (std::size_t a = 0; a < fields.size();) {
    std::size_t b = a + 1;
    if (options.merge_close)
      while (b < fields.size() && fields[b] - fields[b - 1] < step) ++b;
    if (b - a == 1) {
      result.crossings.push_back(make(fields[a]));
    } else {
      // Error-weighted midpoint of a cluster of noise-induced sign changes.
      double wsum = 0.0, acc = 0.0;
      bool weighted = true;
      for (std::size_t k = a; k < b; ++k) weighted = weighted && make(fields[k]).record.m_x.error > 0.0;
      for (std::size_t k = a; k < b; ++k) {
        const double err = make(fields[k]).record.m_x.error;
        const double w = weighted ? 1.0 / (err * err) : 1.0;
        wsum += w;
        acc += w * fields[k];
      }
      result.crossings.push_back(make(acc / wsum));
    }
    a = b;
  }

  if (result.crossings.size() == 1) {
    result.selected = 0;
    result.method = SelectionMethod::only_crossing;
  } else {
    result.selected = free_energy_compare(table, f, result.crossings, options.tie_tolerance, &result.free_energies);
    result.method = result.selected ? SelectionMethod::free_energy : SelectionMethod::unresolved;
  }
  return result;
}

/// Record of the non-stoquastic model at the selected crossing: m_x from the
/// curve and energy (1/N)<H0> - f(m_x) in place of the transverse-field energy.
inline ObservableRecord remap(const CrossingResult& result, const FluctuationSpec& f) {
  if (!result.selected)
    throw MustSelectError("crossings are unresolved; select one before remapping");
  const auto& c = result.crossings.at(*result.selected);
  ObservableRecord r = c.record;
  r.m_x.mean = c.m_x;
  r.effective_field = c.field;
  const double slope = f.derivative(c.m_x);
  r.energy_per_spin = {r.h0_per_spin.mean - f.eval(c.m_x),
                       std::hypot(r.h0_per_spin.error, slope * r.m_x.error)};
  return r;
}

}  // namespace nonstoq

#endif  // NONSTOQ_CROSSING_HPP
