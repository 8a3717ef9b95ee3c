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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nonstoq/cli.hpp"
#include "nonstoq/csv.hpp"
#include "nonstoq/exact.hpp"

namespace nonstoq {
namespace {

const std::string kModel = NONSTOQ_SOURCE_DIR "/models/benchmark_n8.model";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("nonstoq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::filesystem::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, ExactGridMatchesOracle) {
  ASSERT_EQ(run({"exact", "--model", kModel, "--beta", "50", "--Gamma", "0.5,1,2", "--gamma", "0:1:0.5", "--out",
                 path("exact.csv")}),
            0)
      << err_.str();
  const auto rows = read_csv(path("exact.csv"));
  ASSERT_EQ(rows.size(), 9u);
  const auto r = rows[5];  // Gamma = 1, gamma = 1
  EXPECT_EQ(*r.gamma_field, 1.0);
  EXPECT_EQ(*r.xx, 1.0);
  const auto ex = spin_symmetric_exact(0.1, 0.5, FluctuationSpec::linear_quadratic(1.0, 1.0), 50.0, 8);
  EXPECT_EQ(r.m_x, ex.m_x);
  EXPECT_EQ(r.energy_per_spin, ex.energy_per_spin);
  EXPECT_EQ(r.m_x_err, 0.0);
  EXPECT_FALSE(r.acceptance_rate);
  EXPECT_FALSE(r.tau);
}

TEST_F(CliTest, SummaryLinePerRow) {
  ASSERT_EQ(run({"exact", "--model", kModel, "--Gamma", "0.5,1", "--out", path("e.csv")}), 0);
  std::istringstream in(out_.str());
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    EXPECT_EQ(line.rfind("exact N=8", 0), 0u) << line;
    ++lines;
  }
  EXPECT_EQ(lines, 2);
}

TEST_F(CliTest, WorkflowFlagEqualsSubcommand) {
  ASSERT_EQ(run({"exact", "--model", kModel, "--out", path("a.csv")}), 0);
  ASSERT_EQ(run({"--workflow", "exact", "--model", kModel, "--out", path("b.csv")}), 0);
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(run({"sweep", "--workflow", "exact", "--model", kModel}), 2);
}

TEST_F(CliTest, SameSeedSameBytes) {
  const std::vector<std::string> base = {"adaptive",      "--model", kModel, "--tau",  "16", "--sweeps-equil",
                                         "200",           "--sweeps-meas", "2000", "--seed", "7", "--Gamma",
                                         "1,2",           "--workers", "2"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.csv")});
  b.insert(b.end(), {"--out", path("b.csv")});
  ASSERT_EQ(run(a), 0) << err_.str();
  ASSERT_EQ(run(b), 0) << err_.str();
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(read_csv(path("a.csv")).size(), 2u);
}

TEST_F(CliTest, CrossWritesThreeFiles) {
  ASSERT_EQ(run({"cross", "--model", kModel, "--grid", "0:4:0.05", "--tau", "8", "--sweeps-equil", "20",
                 "--sweeps-meas", "100", "--out", path("cross.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(read_csv(path("cross.sweep.csv")).size(), 81u);
  const auto crossings = read_csv(path("cross.crossings.csv"));
  ASSERT_GE(crossings.size(), 1u);
  const auto remapped = read_csv(path("cross.csv"));
  ASSERT_EQ(remapped.size(), 1u);
  EXPECT_EQ(remapped[0].workflow, "cross");
}

TEST_F(CliTest, SigncheckReportsNonStoquasticInput) {
  ASSERT_EQ(run({"signcheck", "--model", kModel, "--Gamma", "0", "--gamma", "1", "--tau", "4", "--out",
                 path("s.csv")}),
            0)
      << err_.str();
  const auto text = slurp(path("s.csv"));
  EXPECT_NE(text.find("signcheck,8,10,4,0,1,0,"), std::string::npos) << text;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"exact"}), 2);                                            // missing --model
  EXPECT_EQ(run({"--model", kModel}), 2);                                  // no workflow
  EXPECT_EQ(run({"--workflow", "bogus", "--model", kModel}), 2);
  EXPECT_EQ(run({"sweep", "--model", kModel, "--grid", "0:4"}), 2);
  EXPECT_EQ(run({"adaptive", "--model", kModel, "--tau", "7"}), 2);
  EXPECT_EQ(run({"exact", "--model", kModel, "--beta", "abc"}), 2);
  EXPECT_EQ(run({"exact", "--model", kModel, "--Gamma", "1,,2"}), 2);
  EXPECT_EQ(run({"exact", "--model", kModel, "--workers", "0"}), 2);
  {
    std::ofstream bad(path("bad.model"));
    bad << "n_spins = 4\nnot a line\n";
  }
  EXPECT_EQ(run({"exact", "--model", path("bad.model")}), 2);
  EXPECT_EQ(run({"exact", "--model", path("missing.model")}), 4);
  EXPECT_EQ(run({"exact", "--model", kModel, "--out", path("no/such/dir/x.csv")}), 4);
  // Linear fluctuation has no f'^-1: numerical failure after the sweep.
  EXPECT_EQ(run({"cross", "--model", kModel, "--gamma", "0", "--grid", "0:1:0.5", "--tau", "4", "--sweeps-equil",
                 "10", "--sweeps-meas", "40", "--out", path("c.csv")}),
            3);
  EXPECT_EQ(run({"adaptive", "--model", kModel, "--sweeps-meas", "1"}), 3);
  EXPECT_FALSE(err_.str().empty());
  EXPECT_EQ(run({"--help"}), 0);
}

}  // namespace
}  // namespace nonstoq
