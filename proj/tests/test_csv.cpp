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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "nonstoq/crossing.hpp"
#include "nonstoq/csv.hpp"
#include "nonstoq/errors.hpp"
#include "nonstoq/rng.hpp"

namespace nonstoq {
namespace {

CsvRow random_row(Rng& rng) {
  CsvRow r;
  r.workflow = rng.uniform() < 0.5 ? "adaptive" : "sweep";
  r.n_spins = 1 + static_cast<int>(rng.below(64));
  r.beta = std::exp(6 * rng.uniform() - 3);
  if (rng.uniform() < 0.8) r.tau = 2 * (1 + static_cast<int>(rng.below(100)));
  if (rng.uniform() < 0.8) r.gamma_field = 4 * rng.uniform();
  if (rng.uniform() < 0.8) r.xx = 2 * rng.uniform() - 1;
  if (rng.uniform() < 0.5) r.gamma_tilde = rng.uniform() * 1e-7;
  r.m_x = rng.uniform();
  r.m_x_err = rng.uniform() * 1e-3;
  r.m_z_abs = rng.uniform();
  r.m_z_abs_err = 1.0 / 3.0;
  r.energy_per_spin = -std::exp(10 * rng.uniform());
  r.energy_err = std::numeric_limits<double>::denorm_min();
  if (rng.uniform() < 0.5) r.acceptance_rate = rng.uniform();
  r.sweeps_equil = static_cast<long>(rng.below(1000000));
  r.sweeps_meas = static_cast<long>(rng.below(1000000));
  r.seed = rng();
  r.converged = rng.uniform() < 0.5;
  return r;
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(123);
  std::vector<CsvRow> rows;
  for (int k = 0; k < 500; ++k) rows.push_back(random_row(rng));
  const auto text = to_csv(rows);
  const auto back = parse_csv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_TRUE(back[k] == rows[k]) << "row " << k;
  EXPECT_EQ(to_csv(back), text);
}

TEST(Csv, HeaderOrder) {
  EXPECT_EQ(csv_header(),
            "workflow,N,beta,tau,Gamma,gamma,gamma_tilde,m_x,m_x_err,m_z_abs,m_z_abs_err,energy_per_spin,"
            "energy_err,acceptance_rate,sweeps_equil,sweeps_meas,seed,converged");
}

TEST(Csv, RejectsMalformed) {
  EXPECT_THROW(parse_csv(""), ParseError);
  EXPECT_THROW(parse_csv("a,b\n"), ParseError);
  EXPECT_THROW(parse_csv(csv_header() + "\nexact,8\n"), ParseError);
  EXPECT_THROW(parse_csv(csv_header() + "\nexact,x,1,,,,,0,0,0,0,0,0,,0,0,0,1\n"), ParseError);
  EXPECT_THROW(parse_csv(csv_header() + "\nexact,8,1,,,,,0,0,0,0,0,0,,0,0,0,2\n"), ParseError);
  EXPECT_NO_THROW(parse_csv(csv_header() + "\nexact,8,1,,,,,0,0,0,0,0,0,,0,0,0,1\n"));
}

TEST(Csv, AtomicWriteAndRead) {
  const auto dir = std::filesystem::temp_directory_path() / "nonstoq_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "rows.csv").string();
  Rng rng(1);
  const std::vector<CsvRow> rows = {random_row(rng), random_row(rng)};
  write_csv(path, rows);
  EXPECT_EQ(read_csv(path), rows);
  for (const auto& e : std::filesystem::directory_iterator(dir))
    EXPECT_EQ(e.path().filename().string().find(".tmp."), std::string::npos);
  std::filesystem::remove_all(dir);
  EXPECT_THROW(write_csv((dir / "missing" / "x.csv").string(), rows), IoError);
  EXPECT_THROW(read_csv((dir / "missing.csv").string()), IoError);
}

TEST(Csv, ParallelSweepWritesIdenticalBytes) {
  const auto model = ClassicalIsing::infinite_range(4, 0.1);
  MCParams p;
  p.beta = 2.0;
  p.tau = 8;
  p.equilibration_sweeps = 50;
  p.measurement_sweeps = 300;
  p.seed = 9;
  auto render = [&](int workers) {
    std::vector<CsvRow> rows;
    for (const auto& r : sweep_standard(model, Grid{0.0, 2.0, 0.25}, p, workers).rows)
      rows.push_back(csv_row("sweep", r.record, r.field, 0.0));
    return to_csv(rows);
  };
  EXPECT_EQ(render(1), render(4));
}

}  // namespace
}  // namespace nonstoq
