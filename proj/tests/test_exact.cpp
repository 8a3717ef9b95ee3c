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
#include <vector>

#include "nonstoq/errors.hpp"
#include "nonstoq/exact.hpp"
#include "nonstoq/model.hpp"

namespace nonstoq {
namespace {

NonStoqModel uniform(int n, double h, const FluctuationSpec& f, double j_ir = 0.5) {
  return {ClassicalIsing::infinite_range(n, h, j_ir), f};
}

TEST(Exact, SingleSpinGroundState) {
  const auto m = uniform(1, 0.6, FluctuationSpec::linear(0.8), 0.0);
  const double e0 = -std::sqrt(0.36 + 0.64);
  EXPECT_NEAR(spin_symmetric_exact(m, 200.0).energy_per_spin, e0, 1e-12);
  EXPECT_NEAR(dense_ed(m, 200.0).energy_per_spin, e0, 1e-12);
  EXPECT_NEAR(dense_ed(m, 200.0).m_x, 0.8, 1e-12);
}

TEST(Exact, SectorDimensionsAddUp) {
  for (int n = 1; n <= 24; ++n) {
    const auto r = spin_symmetric_exact(0.1, 0.5, FluctuationSpec::linear(1.0), 1.0, n);
    EXPECT_NEAR(r.dimension, std::ldexp(1.0, n), 1e-9 * std::ldexp(1.0, n)) << "N = " << n;
    EXPECT_EQ(r.sector_count, n / 2 + 1);
  }
}

TEST(Exact, SolversAgreeOnUniformModels) {
  const std::vector<FluctuationSpec> fs = {FluctuationSpec::linear(1.0), FluctuationSpec::linear_quadratic(1.0, 1.0),
                                           FluctuationSpec::linear_quadratic(0.5, -1.5),
                                           FluctuationSpec::polynomial({0.7, 0.3, -0.4, 0.2})};
  for (int n : {2, 5, 8}) {
    for (const auto& f : fs) {
      const auto m = uniform(n, 0.15, f);
      for (double beta : {0.5, 4.0}) {
        const auto a = spin_symmetric_exact(m, beta);
        const auto b = dense_ed(m, beta);
        EXPECT_NEAR(a.m_x, b.m_x, 1e-10) << f.describe() << " N=" << n;
        EXPECT_NEAR(a.m_z, b.m_z, 1e-10) << f.describe() << " N=" << n;
        EXPECT_NEAR(a.m_z_abs, b.m_z_abs, 1e-10) << f.describe() << " N=" << n;
        EXPECT_NEAR(a.energy_per_spin, b.energy_per_spin, 1e-10) << f.describe() << " N=" << n;
        EXPECT_NEAR(a.free_energy_per_spin, b.free_energy_per_spin, 1e-10) << f.describe() << " N=" << n;
      }
    }
  }
}

TEST(Exact, EnergyIsDerivativeOfFreeEnergy) {
  // E = d(beta F)/d beta.
  const auto m = uniform(10, 0.1, FluctuationSpec::linear_quadratic(1.0, 1.0));
  const double beta = 3.0, d = 1e-4;
  const double bf_plus = (beta + d) * spin_symmetric_exact(m, beta + d).free_energy_per_spin;
  const double bf_minus = (beta - d) * spin_symmetric_exact(m, beta - d).free_energy_per_spin;
  EXPECT_NEAR((bf_plus - bf_minus) / (2 * d), spin_symmetric_exact(m, beta).energy_per_spin, 1e-6);

  const NonStoqModel chain{ClassicalIsing(5, {{0, 1, 1.0}, {1, 2, -0.4}, {3, 4, 0.6}}, {0.2, 0.0, -0.1, 0.0, 0.3}),
                           FluctuationSpec::linear_quadratic(0.8, 0.5)};
  const double fp = (beta + d) * dense_ed(chain, beta + d).free_energy_per_spin;
  const double fm = (beta - d) * dense_ed(chain, beta - d).free_energy_per_spin;
  EXPECT_NEAR((fp - fm) / (2 * d), dense_ed(chain, beta).energy_per_spin, 1e-6);
}

TEST(Exact, FieldReversalSymmetry) {
  const auto f = FluctuationSpec::linear_quadratic(1.0, 0.5);
  const auto up = spin_symmetric_exact(uniform(7, 0.2, f), 5.0);
  const auto down = spin_symmetric_exact(uniform(7, -0.2, f), 5.0);
  EXPECT_NEAR(up.m_z, -down.m_z, 1e-12);
  EXPECT_NEAR(up.m_z_abs, down.m_z_abs, 1e-12);
  EXPECT_NEAR(up.m_x, down.m_x, 1e-12);
  EXPECT_NEAR(up.energy_per_spin, down.energy_per_spin, 1e-12);
}

TEST(Exact, DenseSizeLimit) {
  const auto m = uniform(13, 0.1, FluctuationSpec::linear(1.0));
  EXPECT_THROW(dense_ed(m, 1.0), SizeLimitError);
  EXPECT_NO_THROW(exact_thermal(m, 1.0));
  const NonStoqModel chain{ClassicalIsing(13, {{0, 1, 1.0}}, {}), FluctuationSpec::linear(1.0)};
  EXPECT_THROW(exact_thermal(chain, 1.0), SizeLimitError);
}

TEST(Exact, CalibratedCouplingPutsTransitionNearUnitField) {
  // Steepest drop of <|m_z|> with Gamma, at low temperature and h = 0.
  const int n = 128;
  double best_slope = 0.0, best_gamma = 0.0;
  double prev = spin_symmetric_exact(0.0, kCalibratedInfiniteRangeCoupling, FluctuationSpec::linear(0.6), 50.0, n)
                    .m_z_abs;
  for (double g = 0.62; g <= 1.4; g += 0.02) {
    const double cur =
        spin_symmetric_exact(0.0, kCalibratedInfiniteRangeCoupling, FluctuationSpec::linear(g), 50.0, n).m_z_abs;
    if (prev - cur > best_slope) {
      best_slope = prev - cur;
      best_gamma = g - 0.01;
    }
    prev = cur;
  }
  EXPECT_NEAR(best_gamma, 1.0, 0.1);
}

TEST(Stoquastic, LinearFieldIsStoquastic) {
  const auto r = is_stoquastic(uniform(4, 0.1, FluctuationSpec::linear(1.0)));
  EXPECT_TRUE(r.stoquastic);
  EXPECT_NEAR(r.max_off_diagonal, 0.0, 1e-12);
}

TEST(Stoquastic, FerromagneticXXIsNot) {
  // f = Gamma m - gamma m^2 / 2 gives +(gamma / 2N)(sum sigma^x)^2; the
  // double flips carry +gamma / N.
  const auto r = is_stoquastic(uniform(2, 0.0, FluctuationSpec::linear_quadratic(0.0, 1.0)));
  EXPECT_FALSE(r.stoquastic);
  EXPECT_NEAR(r.max_off_diagonal, 0.5, 1e-12);
  EXPECT_EQ(std::popcount(r.row ^ r.col), 2);
  const auto r4 = is_stoquastic(uniform(4, 0.0, FluctuationSpec::linear_quadratic(1.0, 2.0)));
  EXPECT_NEAR(r4.max_off_diagonal, 0.5, 1e-12);
}

TEST(Stoquastic, AntiferromagneticXXIs) {
  EXPECT_TRUE(is_stoquastic(uniform(4, 0.1, FluctuationSpec::linear_quadratic(1.0, -1.0))).stoquastic);
}

TEST(SignReport, StoquasticModelHasNoSignProblem) {
  const auto rep = naive_sign_report(uniform(4, 0.1, FluctuationSpec::linear(1.0)), 8, 2.0);
  EXPECT_GE(rep.min_transfer_entry, 0.0);
  EXPECT_NEAR(rep.average_sign, 1.0, 1e-12);
}

TEST(SignReport, TransferMatrixTraceIsPartitionFunction) {
  // Tr(T^tau) -> Z as tau grows; compare Z ratios via the free energy.
  const auto m = uniform(3, 0.2, FluctuationSpec::linear_quadratic(0.7, 0.6));
  const double beta = 1.0;
  const int tau = 256;
  const Eigen::MatrixXd t = naive_transfer_matrix(m, tau, beta);
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(t.rows(), t.cols());
  for (int k = 0; k < tau; ++k) p = p * t;
  const double log_z = std::log(p.trace());
  EXPECT_NEAR(-log_z / (beta * 3), dense_ed(m, beta).free_energy_per_spin, 1e-3);
}

TEST(SignReport, TwoSlicesNeverShowASign) {
  // Tr(T^2) = sum_zw D_z D_w K_zw^2 for a symmetric kernel K.
  for (int n : {2, 3, 4})
    EXPECT_NEAR(naive_sign_report(uniform(n, 0.1, FluctuationSpec::linear_quadratic(1.0, 4.0)), 2, 2.0).average_sign,
                1.0, 1e-12);
}

TEST(SignReport, PairXXIsGaugeEquivalentToStoquastic) {
  // For N = 2 and Gamma = 0 the only off-diagonals are double flips, and
  // sigma^z_1 maps the kernel onto its absolute value.
  for (int tau : {2, 3, 4, 8})
    EXPECT_NEAR(naive_sign_report(uniform(2, 0.1, FluctuationSpec::linear_quadratic(0.0, 1.0)), tau, 2.0).average_sign,
                1.0, 1e-12);
}

TEST(SignReport, FrustratedXXHasASignProblem) {
  const auto m = uniform(3, 0.1, FluctuationSpec::linear_quadratic(0.0, 4.0));
  const double s4 = naive_sign_report(m, 4, 2.0).average_sign;
  const double s8 = naive_sign_report(m, 8, 2.0).average_sign;
  EXPECT_NEAR(s4, 0.745311434959616, 1e-9);
  EXPECT_LT(s8, s4);
}

TEST(SignReport, NegativeEntriesAppearWithFerromagneticXX) {
  const auto rep = naive_sign_report(uniform(4, 0.0, FluctuationSpec::linear_quadratic(0.0, 4.0)), 4, 4.0);
  EXPECT_LT(rep.min_transfer_entry, 0.0);
  EXPECT_LE(rep.average_sign, 1.0 + 1e-12);
  EXPECT_THROW(naive_sign_report(uniform(7, 0.0, FluctuationSpec::linear(1.0)), 4, 1.0), SizeLimitError);
}

}  // namespace
}  // namespace nonstoq
