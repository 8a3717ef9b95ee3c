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

// Model file reader. The format is line oriented; '#' starts a comment.
//
//   n_spins = 8
//   infinite_range_coupling = calibrated   # or a number; omitted means 0
//   uniform_field = 0.1                    # h_i for every site (optional)
//
//   [fluctuation]
//   variant = linear_quadratic             # linear | linear_quadratic | polynomial
//   Gamma = 1.0
//   gamma = 1.0
//   coefficients = 1.0 -0.5                # polynomial: c_1 c_2 ...
//   bracket = -8 8                         # polynomial: root bracket for f'^-1
//
//   [couplings]                            # i j J, each unordered pair once
//   0 1 1.0
//
//   [fields]                               # i h, overrides uniform_field
//   0 0.25

#ifndef NONSTOQ_MODEL_IO_HPP
#define NONSTOQ_MODEL_IO_HPP

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/model.hpp"

namespace nonstoq {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, int line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0)
    throw ParseError("line " + std::to_string(line) + ": expected a number, got '" + text + "'");
  return v;
}

inline long parse_int(const std::string& text, int line) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(text.substr(used)).size() != 0)
    throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" + text + "'");
  return v;
}

}  // namespace detail

inline NonStoqModel parse_model(std::istream& in) {
  using detail::parse_double;
  using detail::parse_int;
  using detail::trim;

  std::optional<long> n_spins;
  double j_ir = 0.0;
  std::optional<double> uniform_field;
  std::map<std::string, std::pair<std::string, int>> fluct;
  std::vector<std::pair<Coupling, int>> couplings;
  std::vector<std::pair<std::pair<long, double>, int>> fields;

  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("line " + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "fluctuation" && section != "couplings" && section != "fields")
        throw ParseError("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      continue;
    }
    if (section == "couplings" || section == "fields") {
      std::istringstream ss(line);
      std::vector<std::string> tok;
      for (std::string t; ss >> t;) tok.push_back(t);
      if (section == "couplings") {
        if (tok.size() != 3)
          throw ParseError("line " + std::to_string(line_no) + ": coupling needs 'i j J'");
        couplings.push_back({Coupling{static_cast<int>(parse_int(tok[0], line_no)),
                                      static_cast<int>(parse_int(tok[1], line_no)),
                                      parse_double(tok[2], line_no)},
                             line_no});
      } else {
        if (tok.size() != 2) throw ParseError("line " + std::to_string(line_no) + ": field needs 'i h'");
        fields.push_back({{parse_int(tok[0], line_no), parse_double(tok[1], line_no)}, line_no});
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "fluctuation") {
      fluct[key] = {value, line_no};
    } else if (key == "n_spins") {
      n_spins = parse_int(value, line_no);
    } else if (key == "infinite_range_coupling") {
      j_ir = value == "calibrated" ? kCalibratedInfiniteRangeCoupling : parse_double(value, line_no);
    } else if (key == "uniform_field") {
      uniform_field = parse_double(value, line_no);
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }

  if (!n_spins) throw ParseError("missing n_spins");
  if (*n_spins <= 0) throw ParseError("n_spins must be positive");
  const auto n = static_cast<int>(*n_spins);

  std::vector<double> h(static_cast<std::size_t>(n), uniform_field.value_or(0.0));
  for (const auto& [entry, ln] : fields) {
    if (entry.first < 0 || entry.first >= n)
      throw ParseError("line " + std::to_string(ln) + ": field index out of range");
    h[static_cast<std::size_t>(entry.first)] = entry.second;
  }

  std::set<std::pair<int, int>> seen;
  std::vector<Coupling> cs;
  for (const auto& [c, ln] : couplings) {
    if (c.i < 0 || c.i >= n || c.j < 0 || c.j >= n || c.i == c.j)
      throw ParseError("line " + std::to_string(ln) + ": invalid coupling indices");
    if (!seen.emplace(std::min(c.i, c.j), std::max(c.i, c.j)).second)
      throw ParseError("line " + std::to_string(ln) + ": pair (" + std::to_string(c.i) + ", " +
                       std::to_string(c.j) + ") already listed (list each unordered pair once)");
    cs.push_back(c);
  }

  auto get = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
    if (auto it = fluct.find(key); it != fluct.end()) return it->second;
    return std::nullopt;
  };
  auto number = [&](const std::string& key, double fallback) {
    const auto v = get(key);
    return v ? parse_double(v->first, v->second) : fallback;
  };
  auto numbers = [&](const std::string& key) {
    std::vector<double> out;
    if (const auto v = get(key)) {
      std::istringstream ss(v->first);
      for (std::string t; ss >> t;) out.push_back(parse_double(t, v->second));
    }
    return out;
  };

  FluctuationSpec f;
  const std::string variant = get("variant") ? get("variant")->first : "linear";
  if (variant == "linear") {
    f = Linear{number("Gamma", 0.0)};
  } else if (variant == "linear_quadratic") {
    f = LinearQuadratic{number("Gamma", 0.0), number("gamma", 0.0)};
  } else if (variant == "polynomial") {
    Polynomial p{numbers("coefficients")};
    if (p.coefficients.empty()) throw ParseError("polynomial fluctuation needs coefficients");
    const auto bracket = numbers("bracket");
    if (!bracket.empty()) {
      if (bracket.size() != 2 || !(bracket[0] < bracket[1]))
        throw ParseError("bracket needs two increasing numbers");
      p.bracket_lo = bracket[0];
      p.bracket_hi = bracket[1];
    }
    f = std::move(p);
  } else {
    throw ParseError("unknown fluctuation variant '" + variant + "'");
  }

  return NonStoqModel{ClassicalIsing(n, std::move(cs), std::move(h), j_ir), std::move(f)};
}

inline NonStoqModel parse_model_string(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

inline NonStoqModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return parse_model(in);
}

}  // namespace nonstoq

#endif  // NONSTOQ_MODEL_IO_HPP
