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
//
// Symmetry sectors. A conserved symmetry block-diagonalizes the Hamiltonian;
// a state prepared inside an accessible subspace of dimension d < N keeps its
// return probability enhanced by 2N/(d+1) (GUE) or 3N/(d+2) (GOE) over the
// 1/N ergodic floor, which exceeds the unrestricted 2N/(N+1) and 3N/(N+2).
// Only the block dimension data enters these formulas, so the group itself is
// never represented.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "birthmark/birthmark.hpp"
#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/estimator.hpp"
#include "birthmark/rng.hpp"
#include "birthmark/spectral.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

/// Block structure of a symmetry-resolved Hilbert space: sector dimensions
/// d_alpha plus the subset of sectors a restricted state may occupy.
class SectorLayout {
 public:
  SectorLayout(std::vector<Eigen::Index> sector_dims,
               std::vector<std::size_t> accessible)
      : sector_dims_(std::move(sector_dims)), accessible_(std::move(accessible)) {
    if (sector_dims_.empty())
      throw ConfigError("layout needs at least one sector");
    for (const Eigen::Index d : sector_dims_)
      if (d < 1) throw DimensionError("sector dimensions must be >= 1");
    if (accessible_.empty())
      throw ConfigError("accessible sector set must be nonempty");
    std::sort(accessible_.begin(), accessible_.end());
    accessible_.erase(std::unique(accessible_.begin(), accessible_.end()),
                      accessible_.end());
    if (accessible_.back() >= sector_dims_.size())
      throw ConfigError("accessible sector index " +
                        std::to_string(accessible_.back()) +
                        " out of range for " +
                        std::to_string(sector_dims_.size()) + " sectors");
    offsets_.resize(sector_dims_.size());
    Eigen::Index cursor = 0;
    for (std::size_t s = 0; s < sector_dims_.size(); ++s) {
      offsets_[s] = cursor;
      cursor += sector_dims_[s];
    }
    total_ = cursor;
    accessible_dim_ = 0;
    for (const std::size_t s : accessible_) accessible_dim_ += sector_dims_[s];
  }

  /// Layout with every sector accessible.
  static SectorLayout full(std::vector<Eigen::Index> sector_dims) {
    std::vector<std::size_t> all(sector_dims.size());
    std::iota(all.begin(), all.end(), 0);
    return SectorLayout(std::move(sector_dims), std::move(all));
  }

  const std::vector<Eigen::Index>& sector_dims() const { return sector_dims_; }
  const std::vector<std::size_t>& accessible() const { return accessible_; }
  std::size_t sectors() const { return sector_dims_.size(); }
  Eigen::Index sector_offset(std::size_t s) const { return offsets_[s]; }
  Eigen::Index total() const { return total_; }
  Eigen::Index accessible_dim() const { return accessible_dim_; }

  bool is_accessible(std::size_t s) const {
    return std::binary_search(accessible_.begin(), accessible_.end(), s);
  }

 private:
  std::vector<Eigen::Index> sector_dims_;
  std::vector<std::size_t> accessible_;
  std::vector<Eigen::Index> offsets_;
  Eigen::Index total_ = 0;
  Eigen::Index accessible_dim_ = 0;
};

/// Block-diagonal Hamiltonian whose blocks are independent ensemble samples;
/// entries between sectors are exact zeros.
template <SymmetryClass C>
RandomMatrix<field_of_t<C>> build_block_hamiltonian(const SectorLayout& layout,
                                                    PhiloxRng& rng) {
  using Scalar = field_of_t<C>;
  const Eigen::Index n = layout.total();
  RandomMatrix<Scalar> h;
  h.symmetry = C;
  h.entries = MatrixOf<Scalar>::Zero(n, n);
  for (std::size_t s = 0; s < layout.sectors(); ++s) {
    const Eigen::Index d = layout.sector_dims()[s];
    const Eigen::Index off = layout.sector_offset(s);
    h.entries.block(off, off, d, d) = sample_matrix<C>(d, rng).entries;
  }
  return h;
}

template <SymmetryClass C>
RandomMatrix<field_of_t<C>> build_block_hamiltonian(const SectorLayout& layout,
                                                    std::uint64_t seed,
                                                    std::uint64_t stream = 0) {
  PhiloxRng rng(seed, stream);
  auto h = build_block_hamiltonian<C>(layout, rng);
  h.key = RngKey{seed, stream};
  return h;
}

/// Haar-random state on the accessible subspace, exactly zero elsewhere.
template <SymmetryClass C>
QuantumState<field_of_t<C>> sample_restricted_state(const SectorLayout& layout,
                                                    PhiloxRng& rng) {
  using Scalar = field_of_t<C>;
  VectorOf<Scalar> z = VectorOf<Scalar>::Zero(layout.total());
  double norm = 0.0;
  do {
    for (const std::size_t s : layout.accessible()) {
      const Eigen::Index d = layout.sector_dims()[s];
      const Eigen::Index off = layout.sector_offset(s);
      for (Eigen::Index i = 0; i < d; ++i)
        z[off + i] = detail::gaussian_scalar(rng, static_cast<Scalar*>(nullptr));
    }
    norm = z.norm();
  } while (norm == 0.0);
  return QuantumState<Scalar>(z / norm);
}

template <SymmetryClass C>
QuantumState<field_of_t<C>> sample_restricted_state(const SectorLayout& layout,
                                                    std::uint64_t seed,
                                                    std::uint64_t stream = 0) {
  PhiloxRng rng(seed, stream);
  return sample_restricted_state<C>(layout, rng);
}

/// Enhancement ratio for a state restricted to a d-dimensional accessible
/// subspace of an N-dimensional space: 2N/(d+1) for GUE, 3N/(d+2) for GOE.
/// Setting d = N recovers the unrestricted ratio.
inline double analytic_sector_ratio(SymmetryClass c, Eigen::Index n,
                                    Eigen::Index d) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
  if (d < 1 || d > n)
    throw DomainError("accessible dimension " + std::to_string(d) +
                      " must lie in [1, " + std::to_string(n) + "]");
  const double nn = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  return c == SymmetryClass::gue ? 2.0 * nn / (dd + 1.0)
                                 : 3.0 * nn / (dd + 2.0);
}

namespace detail {

template <SymmetryClass C>
std::array<double, 3> sector_matrix_trial(const SectorLayout& layout,
                                          PhiloxRng& rng) {
  const auto h = build_block_hamiltonian<C>(layout, rng);
  const auto spectrum = decompose(h);
  const auto a = sample_restricted_state<C>(layout, rng);
  const auto b = sample_haar_state<C>(layout.total(), rng);
  Eigen::VectorXd wa = eigen_weights(a, spectrum).values();
  Eigen::VectorXd wb = eigen_weights(b, spectrum).values();
  double degenerate = 0.0;
  if (!spectrum.degeneracy_clusters.empty()) {
    wa = fold_degenerate_weights(wa, spectrum.degeneracy_clusters);
    wb = fold_degenerate_weights(wb, spectrum.degeneracy_clusters);
    degenerate = 1.0;
  }
  return {wa.squaredNorm(), wa.dot(wb), degenerate};
}

}  // namespace detail

/// Estimates the sector-restricted enhancement: the dilation of restricted
/// states a against their overlap with states b Haar-random on the full
/// space. The dirichlet path uses the reduced weight laws directly
/// (Dirichlet on d coordinates for a, on N for b); the matrix path runs the
/// whole block-Hamiltonian eigenvector pipeline.
inline EnhancementReport estimate_sector_ratio(const SectorLayout& layout,
                                               SymmetryClass c,
                                               std::uint64_t samples,
                                               std::uint64_t seed,
                                               SamplePath path = SamplePath::matrix,
                                               int workers = 1) {
  if (samples < 2) throw DomainError("need at least 2 samples");
  const Eigen::Index n = layout.total();
  const Eigen::Index d = layout.accessible_dim();

  std::array<EstimatorResult, 3> totals;
  if (path == SamplePath::dirichlet) {
    totals = run_batched<3>(
        seed, samples,
        [c, n, d](PhiloxRng& rng) -> std::array<double, 3> {
          // Weights of the restricted state over the d eigenstates it can
          // reach follow the reduced Dirichlet law; the generic state's
          // weights over those same eigenstates are the matching marginal
          // of its full N-dimensional Dirichlet vector (exchangeable, so
          // the leading block works).
          const WeightVector wa = sample_dirichlet(c, d, rng);
          const WeightVector wb = sample_dirichlet(c, n, rng);
          return {wa.values().squaredNorm(),
                  wa.values().dot(wb.values().head(d)), 0.0};
        },
        workers);
  } else {
    totals = with_symmetry(c, [&](auto tag) {
      constexpr SymmetryClass kC = decltype(tag)::value;
      return run_batched<3>(
          seed, samples,
          [&layout](PhiloxRng& rng) {
            return detail::sector_matrix_trial<kC>(layout, rng);
          },
          workers, /*batch_size=*/8);
    });
  }

  EnhancementReport report;
  report.symmetry = c;
  report.n = n;
  report.path = path;
  report.samples = samples;
  report.seed = seed;
  report.self_overlap = totals[0];
  report.cross_overlap = totals[1];
  report.degenerate_trials = static_cast<std::uint64_t>(totals[2].sum);
  report.analytic = analytic_sector_ratio(c, n, d);
  return report;
}

}  // namespace birthmark
