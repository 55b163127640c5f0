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
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "birthmark/sectors.hpp"

using namespace birthmark;
using Catch::Approx;

TEST_CASE("layout bookkeeping", "[sectors]") {
  const SectorLayout layout({2, 3, 4}, {0, 2});
  REQUIRE(layout.sectors() == 3);
  REQUIRE(layout.total() == 9);
  REQUIRE(layout.sector_offset(0) == 0);
  REQUIRE(layout.sector_offset(1) == 2);
  REQUIRE(layout.sector_offset(2) == 5);
  REQUIRE(layout.accessible_dim() == 6);
  REQUIRE(layout.is_accessible(0));
  REQUIRE_FALSE(layout.is_accessible(1));
  REQUIRE(layout.is_accessible(2));

  // Duplicates and ordering in the accessible list are normalized away.
  const SectorLayout dup({2, 3}, {1, 0, 1});
  REQUIRE(dup.accessible() == std::vector<std::size_t>{0, 1});
  REQUIRE(dup.accessible_dim() == 5);

  const SectorLayout all = SectorLayout::full({4, 4, 8});
  REQUIRE(all.accessible_dim() == 16);
  REQUIRE(all.accessible() == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("layout contracts are enforced", "[sectors]") {
  REQUIRE_THROWS_AS(SectorLayout({}, {0}), ConfigError);
  REQUIRE_THROWS_AS(SectorLayout({2, 0}, {0}), DimensionError);
  REQUIRE_THROWS_AS(SectorLayout({2, 3}, {}), ConfigError);
  REQUIRE_THROWS_AS(SectorLayout({2, 3}, {2}), ConfigError);
}

TEST_CASE("block hamiltonians vanish between sectors", "[sectors]") {
  const SectorLayout layout({3, 5}, {0});
  const auto h = build_block_hamiltonian<SymmetryClass::goe>(layout, 41);
  REQUIRE(h.dim() == 8);
  REQUIRE(h.key.seed == 41);
  REQUIRE((h.entries - h.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(h.entries.block(0, 3, 3, 5).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(h.entries.block(3, 0, 5, 3).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(h.entries.block(0, 0, 3, 3).cwiseAbs().maxCoeff() > 0.0);

  // Eigenvectors of a block matrix live inside one block each.
  const auto s = decompose(h);
  for (Eigen::Index k = 0; k < 8; ++k) {
    const double head = s.eigenvectors.col(k).head(3).squaredNorm();
    const double tail = s.eigenvectors.col(k).tail(5).squaredNorm();
    REQUIRE(std::min(head, tail) < 1e-12);
  }

  const auto hu = build_block_hamiltonian<SymmetryClass::gue>(
      SectorLayout({2, 2}, {0}), 42);
  REQUIRE((hu.entries - hu.entries.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(hu.entries.block(0, 2, 2, 2).cwiseAbs().maxCoeff() == 0.0);
  const auto su = decompose(hu);
  for (Eigen::Index k = 0; k < 4; ++k) {
    const double head = su.eigenvectors.col(k).head(2).squaredNorm();
    const double tail = su.eigenvectors.col(k).tail(2).squaredNorm();
    REQUIRE(std::min(head, tail) < 1e-12);
  }
}

TEST_CASE("restricted states occupy only accessible sectors", "[sectors]") {
  const SectorLayout layout({2, 3, 4}, {1});
  PhiloxRng rng(43, 0);
  for (int i = 0; i < 20; ++i) {
    const auto state = sample_restricted_state<SymmetryClass::gue>(layout, rng);
    REQUIRE(state.amplitudes().squaredNorm() == Approx(1.0).margin(1e-12));
    REQUIRE(state.amplitudes().head(2).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(state.amplitudes().tail(4).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(state.amplitudes().segment(2, 3).cwiseAbs().maxCoeff() > 0.0);
  }

  // A one-dimensional accessible subspace pins the state up to phase.
  const SectorLayout point({1, 7}, {0});
  const auto goe_state =
      sample_restricted_state<SymmetryClass::goe>(point, 44);
  REQUIRE(std::abs(goe_state.amplitudes()(0)) == Approx(1.0).margin(1e-15));
  const auto gue_state =
      sample_restricted_state<SymmetryClass::gue>(point, 44);
  REQUIRE(std::abs(gue_state.amplitudes()(0)) == Approx(1.0).margin(1e-15));
}

TEST_CASE("sector ratio closed forms and the d = N reduction", "[sectors]") {
  REQUIRE(analytic_sector_ratio(SymmetryClass::gue, 8, 4) ==
          Approx(3.2).epsilon(1e-15));
  REQUIRE(analytic_sector_ratio(SymmetryClass::goe, 16, 4) ==
          Approx(8.0).epsilon(1e-15));
  REQUIRE(analytic_sector_ratio(SymmetryClass::gue, 16, 1) ==
          Approx(16.0).epsilon(1e-15));

  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe})
    for (const Eigen::Index n : {2, 8, 32, 128, 1024})
      REQUIRE(analytic_sector_ratio(c, n, n) == analytic_ratio(c, n));

  // Restriction can only amplify: d < N beats the unrestricted ratio.
  for (const SymmetryClass c : {SymmetryClass::gue, SymmetryClass::goe})
    for (const Eigen::Index n : {4, 16, 64})
      for (Eigen::Index d = 1; d < n; d *= 2)
        REQUIRE(analytic_sector_ratio(c, n, d) > analytic_ratio(c, n));

  REQUIRE_THROWS_AS(analytic_sector_ratio(SymmetryClass::gue, 8, 0),
                    DomainError);
  REQUIRE_THROWS_AS(analytic_sector_ratio(SymmetryClass::gue, 8, 9),
                    DomainError);
  REQUIRE_THROWS_AS(analytic_sector_ratio(SymmetryClass::gue, 0, 1),
                    DimensionError);
}

TEST_CASE("dirichlet-path sector estimates hit the amplified ratio",
          "[sectors]") {
  const SectorLayout layout({4, 4}, {0});
  const auto rep = estimate_sector_ratio(layout, SymmetryClass::gue, 50000,
                                         51, SamplePath::dirichlet);
  REQUIRE(rep.n == 8);
  REQUIRE(rep.analytic == Approx(3.2).epsilon(1e-15));
  REQUIRE(std::abs(rep.p_aa() - 0.4) <
          4.0 * rep.self_overlap.standard_error());
  REQUIRE(std::abs(rep.p_ab() - 1.0 / 8.0) <
          4.0 * rep.cross_overlap.standard_error());
  REQUIRE(std::abs(rep.ratio() - 3.2) < 4.0 * rep.ratio_standard_error());
}

TEST_CASE("matrix-path sector estimates agree with the closed form",
          "[sectors]") {
  const SectorLayout layout({2, 2}, {0});
  const auto rep = estimate_sector_ratio(layout, SymmetryClass::goe, 4000,
                                         52, SamplePath::matrix);
  // 3N/(d+2) with N = 4, d = 2.
  REQUIRE(rep.analytic == Approx(3.0).epsilon(1e-15));
  REQUIRE(std::abs(rep.ratio() - 3.0) < 4.0 * rep.ratio_standard_error());

  const auto gue = estimate_sector_ratio(SectorLayout({2, 2}, {0}),
                                         SymmetryClass::gue, 4000, 53,
                                         SamplePath::matrix);
  REQUIRE(gue.analytic == Approx(8.0 / 3.0).epsilon(1e-15));
  REQUIRE(std::abs(gue.ratio() - 8.0 / 3.0) <
          4.0 * gue.ratio_standard_error());

  REQUIRE_THROWS_AS(
      estimate_sector_ratio(layout, SymmetryClass::goe, 1, 1), DomainError);
}

TEST_CASE("a fully accessible single sector reduces to the plain estimate",
          "[sectors]") {
  // With d = N the dirichlet-path trial draws the same variates in the same
  // order as estimate_enhancement, so the statistics agree bit for bit.
  const auto sector = estimate_sector_ratio(SectorLayout::full({8}),
                                            SymmetryClass::gue, 20000, 54,
                                            SamplePath::dirichlet);
  const auto plain = estimate_enhancement(SymmetryClass::gue, 8, 20000, 54,
                                          SamplePath::dirichlet);
  REQUIRE(sector.self_overlap.sum == plain.self_overlap.sum);
  REQUIRE(sector.cross_overlap.sum == plain.cross_overlap.sum);
  REQUIRE(sector.analytic == plain.analytic);
}
