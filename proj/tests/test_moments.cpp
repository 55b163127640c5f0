// Copyright 2026 The birthmark Authors.
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

#include <cmath>
#include <string>

#include <catch2/catch_amalgamated.hpp>

#include "birthmark/moments.hpp"

using namespace birthmark;
using Catch::Approx;

TEST_CASE("analytic moment tables", "[moments]") {
  const auto gue4 = analytic_moments(SymmetryClass::gue, 4);
  REQUIRE(gue4.e_pi_sq == Approx(0.1).epsilon(1e-15));
  REQUIRE(gue4.e_pi_pj == Approx(0.05).epsilon(1e-15));

  const auto goe4 = analytic_moments(SymmetryClass::goe, 4);
  REQUIRE(goe4.e_pi_sq == Approx(0.125).epsilon(1e-15));
  REQUIRE(goe4.e_pi_pj == Approx(1.0 / 24.0).epsilon(1e-15));

  const auto one = analytic_moments(SymmetryClass::gue, 1);
  REQUIRE(one.e_pi_sq == Approx(1.0).epsilon(1e-15));
  REQUIRE(one.e_pi_pj == 0.0);
  REQUIRE_THROWS_AS(analytic_moments(SymmetryClass::gue, 0), DimensionError);
}

TEST_CASE("normalization identity holds at every dimension", "[moments]") {
  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe})
    for (Eigen::Index n = 1; n <= 256; ++n)
      REQUIRE(std::abs(analytic_moments(c, n).normalization_gap()) < 1e-12);
  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe})
    for (const Eigen::Index n : {1024, 65536, 1 << 20})
      REQUIRE(std::abs(analytic_moments(c, n).normalization_gap()) < 1e-12);
}

TEST_CASE("moment ratio is exactly 2 or 3 at every dimension", "[moments]") {
  for (Eigen::Index n = 2; n <= 128; n *= 2) {
    REQUIRE(pairing_ratio(analytic_moments(SymmetryClass::gue, n)) ==
            Approx(2.0).epsilon(1e-14));
    REQUIRE(pairing_ratio(analytic_moments(SymmetryClass::goe, n)) ==
            Approx(3.0).epsilon(1e-14));
  }
  REQUIRE_THROWS_AS(pairing_ratio(analytic_moments(SymmetryClass::gue, 1)),
                    DegenerateFitError);
}

TEST_CASE("estimated moments land on the closed forms", "[moments]") {
  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe}) {
    const auto est = estimate_moments(c, 8, 100000, 9);
    const auto table = analytic_moments(c, 8);
    REQUIRE(std::abs(est.e_pi_sq.mean() - table.e_pi_sq) <
            4.0 * est.e_pi_sq.standard_error());
    REQUIRE(std::abs(est.e_pi_pj.mean() - table.e_pi_pj) <
            4.0 * est.e_pi_pj.standard_error());
    // Per-sample statistics are built to satisfy the same normalization
    // identity as the analytic table, up to rounding.
    REQUIRE(8.0 * est.e_pi_sq.mean() + 56.0 * est.e_pi_pj.mean() ==
            Approx(1.0).margin(1e-12));
  }
  REQUIRE_THROWS_AS(estimate_moments(SymmetryClass::gue, 1, 1000, 1),
                    DimensionError);
  REQUIRE_THROWS_AS(estimate_moments(SymmetryClass::gue, 4, 1, 1),
                    DomainError);
}

TEST_CASE("dense tensor fit recovers the pairing coefficients", "[moments]") {
  // The fitted coefficients are forced by per-sample normalization, so they
  // sit on the closed form to rounding accuracy; only the scalar moments
  // fluctuate.
  const auto gue = estimate_fourth_tensor(SymmetryClass::gue, 4, 20000, 15);
  REQUIRE(gue.coefficients.size() == 2);
  REQUIRE(gue.coefficients[0].first == "A");
  REQUIRE(gue.coefficients[1].first == "B");
  REQUIRE(gue.coefficients[0].second == Approx(0.05).margin(1e-10));
  REQUIRE(gue.coefficients[1].second == Approx(0.05).margin(1e-10));

  const auto goe = estimate_fourth_tensor(SymmetryClass::goe, 4, 20000, 16);
  REQUIRE(goe.coefficients.size() == 3);
  REQUIRE(goe.coefficients[0].first == "X");
  REQUIRE(goe.coefficients[2].first == "Z");
  for (const auto& [name, value] : goe.coefficients)
    REQUIRE(value == Approx(1.0 / 24.0).margin(1e-10));

  // T_1111 = A + B at n = 2 is the diagonal moment 1/3.
  const auto tiny = estimate_fourth_tensor(SymmetryClass::gue, 2, 20000, 17);
  REQUIRE(tiny.coefficients[0].second + tiny.coefficients[1].second ==
          Approx(1.0 / 3.0).margin(1e-10));
  REQUIRE(std::abs(tiny.diag_moment.mean() - 1.0 / 3.0) <
          4.0 * tiny.diag_moment.standard_error());
}

TEST_CASE("dense fit separates signal from off-pattern noise", "[moments]") {
  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe}) {
    const auto fit = estimate_fourth_tensor(c, 4, 20000, 18);
    const double target = c == SymmetryClass::gue ? 2.0 : 3.0;
    REQUIRE(std::abs(fit.diag_moment.mean() - analytic_moments(c, 4).e_pi_sq) <
            4.0 * fit.diag_moment.standard_error());
    REQUIRE(pairing_ratio(fit) == Approx(target).margin(0.05));
    REQUIRE(fit.residual < 0.01);
    REQUIRE(fit.off_pattern_max_z < 5.0);
    REQUIRE(fit.off_pattern_max_z > 0.0);
  }
}

TEST_CASE("dense estimator enforces its preconditions", "[moments]") {
  REQUIRE_THROWS_AS(estimate_fourth_tensor(SymmetryClass::gue, 1, 20000, 1),
                    DimensionError);
  REQUIRE_THROWS_AS(estimate_fourth_tensor(SymmetryClass::gue, 4, 500, 1),
                    DomainError);
  REQUIRE_THROWS_AS(estimate_fourth_tensor(SymmetryClass::gue, 13, 20000, 1),
                    CapacityError);
}

TEST_CASE("sliced estimator handles dimensions past the dense cap",
          "[moments]") {
  const auto gue = estimate_fourth_tensor_sliced(SymmetryClass::gue, 64,
                                                 20000, 19, 6);
  const double d_gue = 1.0 / (64.0 * 65.0);
  REQUIRE(gue.coefficients.size() == 2);
  REQUIRE(gue.coefficients[0].second == gue.coefficients[1].second);
  REQUIRE(gue.coefficients[0].second == Approx(d_gue).margin(1.5e-5));
  REQUIRE(pairing_ratio(gue) == Approx(2.0).margin(0.15));
  REQUIRE(gue.off_pattern_max_z < 5.0);

  const auto goe = estimate_fourth_tensor_sliced(SymmetryClass::goe, 32,
                                                 20000, 20, 6);
  const double d_goe = 1.0 / (32.0 * 34.0);
  REQUIRE(goe.coefficients.size() == 3);
  REQUIRE(goe.coefficients[0].second == Approx(d_goe).margin(1e-4));
  REQUIRE(pairing_ratio(goe) == Approx(3.0).margin(0.2));
  REQUIRE(goe.off_pattern_max_z < 5.0);

  REQUIRE_THROWS_AS(
      estimate_fourth_tensor_sliced(SymmetryClass::gue, 64, 20000, 1, 0),
      ConfigError);
  REQUIRE_THROWS_AS(
      estimate_fourth_tensor_sliced(SymmetryClass::gue, 1, 20000, 1),
      DimensionError);
}

TEST_CASE("dense and sliced estimators share the scalar-moment stream",
          "[moments]") {
  // Both estimators draw trial t from stream t of the same seed, so the
  // scalar sufficient statistics must agree bit for bit.
  const auto dense = estimate_fourth_tensor(SymmetryClass::gue, 6, 10000, 21);
  const auto sliced =
      estimate_fourth_tensor_sliced(SymmetryClass::gue, 6, 10000, 21, 4);
  REQUIRE(dense.diag_moment.sum == sliced.diag_moment.sum);
  REQUIRE(dense.diag_moment.sum_sq == sliced.diag_moment.sum_sq);
  REQUIRE(dense.pair_moment.sum == sliced.pair_moment.sum);

  // Worker count must not change a single bit either.
  const auto threaded = estimate_fourth_tensor(SymmetryClass::gue, 6, 10000,
                                               21, 3);
  REQUIRE(threaded.diag_moment.sum == dense.diag_moment.sum);
  REQUIRE(threaded.coefficients[0].second == dense.coefficients[0].second);
  REQUIRE(threaded.residual == dense.residual);
}

TEST_CASE("degenerate fits are rejected", "[moments]") {
  TensorFit fit;
  fit.pair_moment.add(0.0);
  fit.pair_moment.add(0.0);
  fit.diag_moment.add(1.0);
  fit.diag_moment.add(1.0);
  REQUIRE_THROWS_AS(pairing_ratio(fit), DegenerateFitError);
}
