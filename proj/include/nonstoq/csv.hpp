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

// Result files. Every workflow writes the same columns, doubles with 17
// significant digits so a file parses back to the identical values.

#ifndef NONSTOQ_CSV_HPP
#define NONSTOQ_CSV_HPP

#include <array>
#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "nonstoq/errors.hpp"
#include "nonstoq/exact.hpp"
#include "nonstoq/pimc.hpp"

namespace nonstoq {

inline constexpr std::array<std::string_view, 18> kCsvColumns = {
    "workflow",        "N",          "beta",          "tau",         "Gamma",          "gamma",
    "gamma_tilde",     "m_x",        "m_x_err",       "m_z_abs",     "m_z_abs_err",    "energy_per_spin",
    "energy_err",      "acceptance_rate", "sweeps_equil", "sweeps_meas", "seed",        "converged"};

struct CsvRow {
  std::string workflow;
  int n_spins = 0;
  double beta = 0.0;
  std::optional<int> tau;
  std::optional<double> gamma_field;
  std::optional<double> xx;
  std::optional<double> gamma_tilde;
  double m_x = 0.0;
  double m_x_err = 0.0;
  double m_z_abs = 0.0;
  double m_z_abs_err = 0.0;
  double energy_per_spin = 0.0;
  double energy_err = 0.0;
  std::optional<double> acceptance_rate;
  long sweeps_equil = 0;
  long sweeps_meas = 0;
  std::uint64_t seed = 0;
  bool converged = true;

  bool operator==(const CsvRow&) const = default;
};

inline CsvRow csv_row(std::string workflow, const ObservableRecord& r, std::optional<double> gamma_field,
                      std::optional<double> xx, bool converged = true) {
  CsvRow row;
  row.workflow = std::move(workflow);
  row.n_spins = r.n_spins;
  row.beta = r.beta;
  row.tau = r.tau;
  row.gamma_field = gamma_field;
  row.xx = xx;
  row.gamma_tilde = r.effective_field;
  row.m_x = r.m_x.mean;
  row.m_x_err = r.m_x.error;
  row.m_z_abs = r.m_z_abs.mean;
  row.m_z_abs_err = r.m_z_abs.error;
  row.energy_per_spin = r.energy_per_spin.mean;
  row.energy_err = r.energy_per_spin.error;
  row.acceptance_rate = r.acceptance_rate;
  row.sweeps_equil = r.equilibration_sweeps;
  row.sweeps_meas = r.measurement_sweeps;
  row.seed = r.seed;
  row.converged = converged;
  return row;
}

/// Oracle rows: zero errors, no acceptance rate, no Trotter number.
inline CsvRow csv_row(const SpectralResult& r, int n_spins, double beta, std::optional<double> gamma_field,
                      std::optional<double> xx) {
  CsvRow row;
  row.workflow = "exact";
  row.n_spins = n_spins;
  row.beta = beta;
  row.gamma_field = gamma_field;
  row.xx = xx;
  row.m_x = r.m_x;
  row.m_z_abs = r.m_z_abs;
  row.energy_per_spin = r.energy_per_spin;
  return row;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_field(const std::string& s, const char* column) {
  std::istringstream ss(s);
  T v{};
  if constexpr (std::is_same_v<T, double>) {
    char* end = nullptr;
    errno = 0;
    v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw ParseError(std::string("bad value '") + s + "' in column " + column);
    return v;
  } else {
    if (!(ss >> v) || !(ss >> std::ws).eof())
      throw ParseError(std::string("bad value '") + s + "' in column " + column);
    return v;
  }
}

template <class T>
std::optional<T> parse_optional(const std::string& s, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_field<T>(s, column);
}

}  // namespace detail

inline std::string csv_header() {
  std::string h;
  for (std::size_t k = 0; k < kCsvColumns.size(); ++k) {
    if (k) h += ',';
    h += kCsvColumns[k];
  }
  return h;
}

inline std::string to_csv_line(const CsvRow& r) {
  using detail::format_double;
  auto opt = [](const auto& o) -> std::string {
    if (!o) return {};
    if constexpr (std::is_same_v<std::decay_t<decltype(*o)>, double>) return format_double(*o);
    else return std::to_string(*o);
  };
  std::string s;
  const std::string cells[] = {r.workflow,
                               std::to_string(r.n_spins),
                               format_double(r.beta),
                               opt(r.tau),
                               opt(r.gamma_field),
                               opt(r.xx),
                               opt(r.gamma_tilde),
                               format_double(r.m_x),
                               format_double(r.m_x_err),
                               format_double(r.m_z_abs),
                               format_double(r.m_z_abs_err),
                               format_double(r.energy_per_spin),
                               format_double(r.energy_err),
                               opt(r.acceptance_rate),
                               std::to_string(r.sweeps_equil),
                               std::to_string(r.sweeps_meas),
                               std::to_string(r.seed),
                               r.converged ? "1" : "0"};
  for (std::size_t k = 0; k < std::size(cells); ++k) {
    if (k) s += ',';
    s += cells[k];
  }
  return s;
}

inline std::string to_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header() + '\n';
  for (const auto& r : rows) out += to_csv_line(r) + '\n';
  return out;
}

inline std::vector<CsvRow> parse_csv(const std::string& text) {
  using detail::parse_field;
  using detail::parse_optional;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line).size() != kCsvColumns.size() ||
      line.rfind(csv_header(), 0) != 0)
    throw ParseError("missing or unexpected CSV header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = detail::split_csv_line(line);
    if (c.size() != kCsvColumns.size())
      throw ParseError("CSV row has " + std::to_string(c.size()) + " cells, expected " +
                       std::to_string(kCsvColumns.size()));
    CsvRow r;
    r.workflow = c[0];
    r.n_spins = parse_field<int>(c[1], "N");
    r.beta = parse_field<double>(c[2], "beta");
    r.tau = parse_optional<int>(c[3], "tau");
    r.gamma_field = parse_optional<double>(c[4], "Gamma");
    r.xx = parse_optional<double>(c[5], "gamma");
    r.gamma_tilde = parse_optional<double>(c[6], "gamma_tilde");
    r.m_x = parse_field<double>(c[7], "m_x");
    r.m_x_err = parse_field<double>(c[8], "m_x_err");
    r.m_z_abs = parse_field<double>(c[9], "m_z_abs");
    r.m_z_abs_err = parse_field<double>(c[10], "m_z_abs_err");
    r.energy_per_spin = parse_field<double>(c[11], "energy_per_spin");
    r.energy_err = parse_field<double>(c[12], "energy_err");
    r.acceptance_rate = parse_optional<double>(c[13], "acceptance_rate");
    r.sweeps_equil = parse_field<long>(c[14], "sweeps_equil");
    r.sweeps_meas = parse_field<long>(c[15], "sweeps_meas");
    r.seed = parse_field<std::uint64_t>(c[16], "seed");
    const int conv = parse_field<int>(c[17], "converged");
    if (conv != 0 && conv != 1) throw ParseError("converged must be 0 or 1");
    r.converged = conv == 1;
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`, so readers never see a partial file.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  auto tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move results into '" + path + "'");
  }
}

inline void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  write_file_atomic(path, to_csv(rows));
}

inline std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace nonstoq

#endif  // NONSTOQ_CSV_HPP
