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
// Long-time-averaged transition probabilities of random states and their
// closed-form ensemble means. The observable is
//     P_ab = sum_n p_n^a p_n^b
// (the infinite-time average of |<b|U(t)|a>|^2), whose self value P_aa is the
// inverse participation ratio. Haar averages give P_aa = 2/(N+1) (GUE) or
// 3/(N+2) (GOE) against P_ab = 1/N for independent states, so the return
// probability of any state stays enhanced over the ergodic floor by a factor
// approaching 2 or 3 depending only on the symmetry class.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/estimator.hpp"
#include "birthmark/spectral.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

/// sum_n p_n^a p_n^b: the long-time average of the a -> b transition
/// probability, in (0, 1].
inline double long_time_overlap(const WeightVector& wa, const WeightVector& wb) {
  if (wa.dim() != wb.dim())
    throw DimensionError("weight vectors have dimensions " +
                         std::to_string(wa.dim()) + " and " +
                         std::to_string(wb.dim()));
  return wa.values().dot(wb.values());
}

/// sum_n p_n^2: the inverse participation ratio; bounded below by 1/N, with
/// equality only at uniform weights.
inline double dilation(const WeightVector& w) { return w.values().squaredNorm(); }

/// Haar-ensemble mean of the self-overlap: 2/(N+1) for GUE, 3/(N+2) for GOE.
inline double analytic_self_overlap(SymmetryClass c, Eigen::Index n) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
  const double nn = static_cast<double>(n);
  return c == SymmetryClass::gue ? 2.0 / (nn + 1.0) : 3.0 / (nn + 2.0);
}

/// The universal enhancement ratio P_aa / P_ab: 2N/(N+1) for GUE and
/// 3N/(N+2) for GOE, approaching 2 and 3 at large N.
inline double analytic_ratio(SymmetryClass c, Eigen::Index n) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
  const double nn = static_cast<double>(n);
  return c == SymmetryClass::gue ? 2.0 * nn / (nn + 1.0)
                                 : 3.0 * nn / (nn + 2.0);
}

/// How weight vectors are produced in a Monte Carlo run: directly from the
/// Dirichlet law, or by diagonalizing sampled matrices and projecting sampled
/// states onto the eigenbasis.
enum class SamplePath { dirichlet, matrix };

inline const char* to_string(SamplePath p) {
  return p == SamplePath::dirichlet ? "dirichlet" : "matrix";
}

inline SamplePath parse_sample_path(std::string_view name) {
  if (name == "dirichlet") return SamplePath::dirichlet;
  if (name == "matrix") return SamplePath::matrix;
  throw ConfigError("unknown path: '" + std::string(name) +
                    "' (expected dirichlet or matrix)");
}

/// Monte Carlo estimates of P_aa and P_ab with their analytic reference.
struct EnhancementReport {
  SymmetryClass symmetry = SymmetryClass::gue;
  Eigen::Index n = 0;
  SamplePath path = SamplePath::dirichlet;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  EstimatorResult self_overlap;   // P_aa
  EstimatorResult cross_overlap;  // P_ab
  std::uint64_t degenerate_trials = 0;
  double analytic = 0.0;  // closed-form ratio for (symmetry, n)

  double p_aa() const { return self_overlap.mean(); }
  double p_ab() const { return cross_overlap.mean(); }

  double ratio() const {
    const double ab = p_ab();
    return ab > 0.0 ? p_aa() / ab : std::numeric_limits<double>::quiet_NaN();
  }

  /// First-order (delta method) standard error of the ratio.
  double ratio_standard_error() const {
    const double r = ratio();
    const double rel_aa = self_overlap.standard_error() / p_aa();
    const double rel_ab = cross_overlap.standard_error() / p_ab();
    return std::abs(r) * std::sqrt(rel_aa * rel_aa + rel_ab * rel_ab);
  }
};

namespace detail {

template <SymmetryClass C>
std::array<double, 3> enhancement_matrix_trial(Eigen::Index n, PhiloxRng& rng) {
  const auto matrix = sample_matrix<C>(n, rng);
  const auto spectrum = decompose(matrix);
  const auto a = sample_haar_state<C>(n, rng);
  const auto b = sample_haar_state<C>(n, rng);
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

/// Estimates P_aa (mean dilation of one random state) and P_ab (mean overlap
/// of two independent random states) over `samples` trials. Both paths
/// converge to the same closed forms; the matrix path exercises the full
/// eigenvector pipeline and folds degenerate clusters when they occur.
inline EnhancementReport estimate_enhancement(SymmetryClass c, Eigen::Index n,
                                              std::uint64_t samples,
                                              std::uint64_t seed,
                                              SamplePath path = SamplePath::dirichlet,
                                              int workers = 1) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
  if (samples < 2) throw DomainError("need at least 2 samples");

  std::array<EstimatorResult, 3> totals;
  if (path == SamplePath::dirichlet) {
    totals = run_batched<3>(
        seed, samples,
        [c, n](PhiloxRng& rng) -> std::array<double, 3> {
          const WeightVector wa = sample_dirichlet(c, n, rng);
          const WeightVector wb = sample_dirichlet(c, n, rng);
          return {dilation(wa), long_time_overlap(wa, wb), 0.0};
        },
        workers);
  } else {
    // Matrix trials carry an O(n^3) eigensolve; use small batches so that
    // threads stay busy.
    totals = with_symmetry(c, [&](auto tag) {
      constexpr SymmetryClass kC = decltype(tag)::value;
      return run_batched<3>(
          seed, samples,
          [n](PhiloxRng& rng) {
            return detail::enhancement_matrix_trial<kC>(n, rng);
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
  report.analytic = analytic_ratio(c, n);
  return report;
}

}  // namespace birthmark
