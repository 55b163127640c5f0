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
// Moments of Haar-random weight vectors. The closed forms are
//     C = E[p_i^2] = 2/(N(N+1))  (GUE),  3/(N(N+2))  (GOE)
//     D = E[p_i p_j] = 1/(N(N+1))  (GUE),  1/(N(N+2))  (GOE)
// with the normalization identity N C + N(N-1) D = 1, so C = 2D or C = 3D
// depending only on the symmetry class. The empirical side estimates the
// fourth-moment tensor of the amplitudes and fits the pairing ansatz: by
// invariance the tensor must be a combination of index-pairing deltas, two
// terms for GUE (T = A d_ab d_cd + B d_ad d_bc) and three for GOE.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/estimator.hpp"
#include "birthmark/rng.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

/// Second mixed moments of the weight vector p.
struct MomentTable {
  SymmetryClass symmetry = SymmetryClass::gue;
  Eigen::Index n = 0;
  double e_pi_sq = 0.0;  // C = E[p_i^2]
  double e_pi_pj = 0.0;  // D = E[p_i p_j], i != j; zero when n = 1

  /// n*C + n(n-1)*D - 1; vanishes in exact arithmetic because sum_i p_i = 1.
  double normalization_gap() const {
    const double nn = static_cast<double>(n);
    return nn * e_pi_sq + nn * (nn - 1.0) * e_pi_pj - 1.0;
  }
};

inline MomentTable analytic_moments(SymmetryClass c, Eigen::Index n) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
  const double nn = static_cast<double>(n);
  MomentTable t;
  t.symmetry = c;
  t.n = n;
  const double denom =
      c == SymmetryClass::gue ? nn * (nn + 1.0) : nn * (nn + 2.0);
  t.e_pi_sq = (c == SymmetryClass::gue ? 2.0 : 3.0) / denom;
  t.e_pi_pj = n > 1 ? 1.0 / denom : 0.0;
  return t;
}

/// Monte Carlo counterpart of MomentTable. Each trial contributes the
/// index-averaged statistics (1/n) sum_i p_i^2 and its complement spread over
/// the n(n-1) ordered pairs, so the normalization identity holds per sample
/// up to rounding.
struct MomentEstimate {
  SymmetryClass symmetry = SymmetryClass::gue;
  Eigen::Index n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  EstimatorResult e_pi_sq;
  EstimatorResult e_pi_pj;
};

inline MomentEstimate estimate_moments(SymmetryClass c, Eigen::Index n,
                                       std::uint64_t samples,
                                       std::uint64_t seed, int workers = 1) {
  if (n < 2) throw DimensionError("moment estimation needs dimension >= 2");
  if (samples < 2) throw DomainError("need at least 2 samples");
  const double nn = static_cast<double>(n);
  const auto totals = run_batched<2>(
      seed, samples,
      [c, n, nn](PhiloxRng& rng) -> std::array<double, 2> {
        const WeightVector w = sample_dirichlet(c, n, rng);
        const double sumsq = w.values().squaredNorm();
        return {sumsq / nn, (1.0 - sumsq) / (nn * (nn - 1.0))};
      },
      workers);
  MomentEstimate est;
  est.symmetry = c;
  est.n = n;
  est.samples = samples;
  est.seed = seed;
  est.e_pi_sq = totals[0];
  est.e_pi_pj = totals[1];
  return est;
}

/// Result of fitting the pairing ansatz to an estimated fourth-moment tensor.
/// `coefficients` holds (A, B) for GUE or (X, Y, Z) for GOE in order.
/// `diag_moment` and `pair_moment` estimate C and D from the per-sample
/// scalars, independently of the tensor fit, so their ratio fluctuates like
/// any Monte Carlo quantity instead of being fixed by the ansatz.
struct TensorFit {
  SymmetryClass symmetry = SymmetryClass::gue;
  Eigen::Index n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> coefficients;
  double residual = 0.0;           // largest |entry| off the pairing support
  double off_pattern_max_z = 0.0;  // same entries, in standard-error units
  EstimatorResult diag_moment;     // estimates C
  EstimatorResult pair_moment;     // estimates D
};

/// Estimated C/D; 2 for GUE and 3 for GOE at every dimension.
inline double pairing_ratio(const TensorFit& fit) {
  const double d = fit.pair_moment.mean();
  if (!(d > 0.0))
    throw DegenerateFitError("estimated pair moment is not positive");
  return fit.diag_moment.mean() / d;
}

inline double pairing_ratio(const MomentTable& table) {
  if (!(table.e_pi_pj > 0.0))
    throw DegenerateFitError("pair moment is not positive");
  return table.e_pi_sq / table.e_pi_pj;
}

/// Largest dimension for which the dense n^4-entry estimator is allowed.
inline constexpr Eigen::Index kMaxDenseTensorDim = 12;

namespace detail {

inline bool on_pairing_support(SymmetryClass c, Eigen::Index a, Eigen::Index b,
                               Eigen::Index g, Eigen::Index d) {
  const bool paired = (a == b && g == d) || (a == d && b == g);
  if (c == SymmetryClass::goe) return paired || (a == g && b == d);
  return paired;
}

inline Eigen::Index uniform_index(PhiloxRng& rng, Eigen::Index n) {
  const auto i = static_cast<Eigen::Index>(rng.uniform_half_open() *
                                           static_cast<double>(n));
  return std::min(i, n - 1);
}

/// Per-sample scalar moments: (1/n) sum_i p_i^2 estimates C and
/// (1 - sum_i p_i^2)/(n(n-1)) estimates D.
inline std::pair<double, double> scalar_moments(const Eigen::VectorXd& p) {
  const double nn = static_cast<double>(p.size());
  const double sumsq = p.squaredNorm();
  return {sumsq / nn, (1.0 - sumsq) / (nn * (nn - 1.0))};
}

template <SymmetryClass C>
TensorFit dense_tensor_fit(Eigen::Index n, std::uint64_t samples,
                           std::uint64_t seed, int workers) {
  using Scalar = field_of_t<C>;
  const Eigen::Index nn = n * n;
  const std::uint64_t batch = kDefaultBatchSize;
  const std::uint64_t num_batches = (samples + batch - 1) / batch;

  struct Partial {
    MatrixOf<Scalar> acc1;  // sum over samples of vec(m) vec(m)^T
    Eigen::MatrixXd acc2;   // sum of elementwise |...|^2, for per-entry errors
    EstimatorResult diag, pair;
  };

  MatrixOf<Scalar> acc1 = MatrixOf<Scalar>::Zero(nn, nn);
  Eigen::MatrixXd acc2 = Eigen::MatrixXd::Zero(nn, nn);
  EstimatorResult diag_stat, pair_stat;

  reduce_batches_in_order(
      num_batches, workers,
      [&](std::uint64_t b) {
        const std::uint64_t begin = b * batch;
        const std::uint64_t end = std::min(samples, begin + batch);
        const auto width = static_cast<Eigen::Index>(end - begin);
        Partial p;
        p.acc1.resize(nn, nn);
        p.acc2.resize(nn, nn);
        MatrixOf<Scalar> v(nn, width);
        for (Eigen::Index t = 0; t < width; ++t) {
          PhiloxRng rng(seed, begin + static_cast<std::uint64_t>(t));
          const auto state = sample_haar_state<C>(n, rng);
          const MatrixOf<Scalar> m =
              state.amplitudes() * state.amplitudes().adjoint();
          v.col(t) = Eigen::Map<const VectorOf<Scalar>>(m.data(), nn);
          const auto [sc, sd] = scalar_moments(state.amplitudes().cwiseAbs2());
          p.diag.add(sc);
          p.pair.add(sd);
        }
        // T_{ab,gd} averages m_{ab} m_{gd} with a plain (unconjugated)
        // transpose, matching E[c_a c_b* c_g c_d*].
        p.acc1.noalias() = v * v.transpose();
        const Eigen::MatrixXd q = v.cwiseAbs2();
        p.acc2.noalias() = q * q.transpose();
        return p;
      },
      [&](Partial&& p) {
        acc1 += p.acc1;
        acc2 += p.acc2;
        diag_stat += p.diag;
        pair_stat += p.pair;
      });

  const double count = static_cast<double>(samples);
  const MatrixOf<Scalar> mean = acc1 / Scalar(count);

  // Ordinary least squares against the delta patterns. The Gram matrix has
  // n^2 on the diagonal (each pattern touches n^2 entries) and n off it
  // (patterns intersect exactly on the n fully-diagonal entries).
  const double nd = static_cast<double>(n);
  TensorFit fit;
  fit.symmetry = C;
  fit.n = n;
  fit.samples = samples;
  fit.seed = seed;
  fit.diag_moment = diag_stat;
  fit.pair_moment = pair_stat;

  auto entry = [&](Eigen::Index a, Eigen::Index b, Eigen::Index g,
                   Eigen::Index d) { return mean(a + n * b, g + n * d); };
  if constexpr (C == SymmetryClass::gue) {
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index g = 0; g < n; ++g) {
        s1 += std::real(entry(a, a, g, g));
        s2 += std::real(entry(a, g, g, a));
      }
    Eigen::Matrix2d gram;
    gram << nd * nd, nd, nd, nd * nd;
    const Eigen::Vector2d coef = gram.ldlt().solve(Eigen::Vector2d(s1, s2));
    fit.coefficients = {{"A", coef[0]}, {"B", coef[1]}};
  } else {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        s1 += std::real(entry(i, i, j, j));
        s2 += std::real(entry(i, j, i, j));
        s3 += std::real(entry(i, j, j, i));
      }
    Eigen::Matrix3d gram;
    gram << nd * nd, nd, nd, nd, nd * nd, nd, nd, nd, nd * nd;
    const Eigen::Vector3d coef =
        gram.ldlt().solve(Eigen::Vector3d(s1, s2, s3));
    fit.coefficients = {{"X", coef[0]}, {"Y", coef[1]}, {"Z", coef[2]}};
  }

  // Scan everything outside the pairing support; the model predicts zero
  // there, so the deviation is just the entry magnitude.
  for (Eigen::Index r = 0; r < nn; ++r)
    for (Eigen::Index q = 0; q < nn; ++q) {
      const Eigen::Index a = r % n, b = r / n, g = q % n, d = q / n;
      if (on_pairing_support(C, a, b, g, d)) continue;
      const double mag = std::abs(mean(r, q));
      fit.residual = std::max(fit.residual, mag);
      const double var =
          std::max(0.0, acc2(r, q) / count - std::norm(mean(r, q)));
      const double se = std::sqrt(var / (count - 1.0));
      if (se > 0.0)
        fit.off_pattern_max_z = std::max(fit.off_pattern_max_z, mag / se);
      else if (mag > 0.0)
        fit.off_pattern_max_z = std::numeric_limits<double>::infinity();
    }
  return fit;
}

}  // namespace detail

/// Estimates the fourth-moment amplitude tensor over Haar states and fits the
/// pairing ansatz. GUE uses T_{abgd} = E[c_a c_b* c_g c_d*]; GOE uses raw
/// real amplitudes T_{ijkl} = E[c_i c_j c_k c_l].
inline TensorFit estimate_fourth_tensor(SymmetryClass c, Eigen::Index n,
                                        std::uint64_t samples,
                                        std::uint64_t seed, int workers = 1) {
  if (n < 2) throw DimensionError("tensor estimation needs dimension >= 2");
  if (samples < 10000)
    throw DomainError("tensor estimation needs at least 10^4 samples");
  if (n > kMaxDenseTensorDim)
    throw CapacityError(
        "dense tensor estimation stores n^4 entries and is capped at n = " +
        std::to_string(kMaxDenseTensorDim) +
        "; use estimate_fourth_tensor_sliced for larger dimensions");
  return with_symmetry(c, [&](auto tag) {
    return detail::dense_tensor_fit<decltype(tag)::value>(n, samples, seed,
                                                          workers);
  });
}

/// Sliced variant for dimensions past the dense cap: accumulates only the
/// representative patterns (iiii), (iijj), (ijij), (ijji) on a random set of
/// index pairs, which is all the pairing fit needs. The off-pattern probe is
/// E[c_i^2 c_j*^2] for GUE and E[c_i^3 c_j] for GOE.
inline TensorFit estimate_fourth_tensor_sliced(SymmetryClass c, Eigen::Index n,
                                               std::uint64_t samples,
                                               std::uint64_t seed,
                                               Eigen::Index pairs = 8,
                                               int workers = 1) {
  if (n < 2) throw DimensionError("tensor estimation needs dimension >= 2");
  if (samples < 2) throw DomainError("need at least 2 samples");
  if (pairs < 1) throw ConfigError("need at least one index pair");

  // The pair set is drawn from a dedicated stream so it never collides with
  // per-trial streams, and is sorted for reproducibility.
  const auto max_pairs = static_cast<std::uint64_t>(n) *
                         static_cast<std::uint64_t>(n - 1) / 2;
  const std::uint64_t target =
      std::min(static_cast<std::uint64_t>(pairs), max_pairs);
  std::set<std::pair<Eigen::Index, Eigen::Index>> chosen;
  PhiloxRng pick(seed, 0x8000000000000000ull);
  while (chosen.size() < target) {
    Eigen::Index i = detail::uniform_index(pick, n);
    Eigen::Index j = detail::uniform_index(pick, n);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    chosen.insert({i, j});
  }
  const std::vector<std::pair<Eigen::Index, Eigen::Index>> pair_list(
      chosen.begin(), chosen.end());
  const std::size_t k = pair_list.size();

  // Layout per trial: [0] scalar C stat, [1] scalar D stat, then per pair
  // the pattern value and the probe's real and imaginary parts.
  const std::size_t width = 2 + 3 * k;
  std::vector<EstimatorResult> stats(width);
  const std::uint64_t batch = kDefaultBatchSize;
  const std::uint64_t num_batches = (samples + batch - 1) / batch;

  with_symmetry(c, [&](auto tag) {
    constexpr SymmetryClass kC = decltype(tag)::value;
    detail::reduce_batches_in_order(
        num_batches, workers,
        [&](std::uint64_t b) {
          const std::uint64_t begin = b * batch;
          const std::uint64_t end = std::min(samples, begin + batch);
          std::vector<EstimatorResult> acc(width);
          for (std::uint64_t t = begin; t < end; ++t) {
            PhiloxRng rng(seed, t);
            const auto state = sample_haar_state<kC>(n, rng);
            const auto& amp = state.amplitudes();
            const Eigen::VectorXd p = amp.cwiseAbs2();
            const auto [sc, sd] = detail::scalar_moments(p);
            acc[0].add(sc);
            acc[1].add(sd);
            for (std::size_t m = 0; m < k; ++m) {
              const auto [i, j] = pair_list[m];
              acc[2 + 3 * m].add(p[i] * p[j]);
              std::complex<double> probe;
              if constexpr (kC == SymmetryClass::gue) {
                const std::complex<double> ci = amp[i], cj = amp[j];
                probe = ci * ci * std::conj(cj * cj);
              } else {
                probe = amp[i] * amp[i] * amp[i] * amp[j];
              }
              acc[2 + 3 * m + 1].add(probe.real());
              acc[2 + 3 * m + 2].add(probe.imag());
            }
          }
          return acc;
        },
        [&](std::vector<EstimatorResult>&& acc) {
          for (std::size_t i = 0; i < width; ++i) stats[i] += acc[i];
        });
  });

  TensorFit fit;
  fit.symmetry = c;
  fit.n = n;
  fit.samples = samples;
  fit.seed = seed;
  fit.diag_moment = stats[0];
  fit.pair_moment = stats[1];

  double pattern_mean = 0.0;
  for (std::size_t m = 0; m < k; ++m)
    pattern_mean += stats[2 + 3 * m].mean();
  pattern_mean /= static_cast<double>(k);
  if (c == SymmetryClass::gue)
    fit.coefficients = {{"A", pattern_mean}, {"B", pattern_mean}};
  else
    fit.coefficients = {
        {"X", pattern_mean}, {"Y", pattern_mean}, {"Z", pattern_mean}};

  for (std::size_t m = 0; m < k; ++m) {
    const auto& re = stats[2 + 3 * m + 1];
    const auto& im = stats[2 + 3 * m + 2];
    const double mag = std::hypot(re.mean(), im.mean());
    fit.residual = std::max(fit.residual, mag);
    const double se = std::hypot(re.standard_error(), im.standard_error());
    if (se > 0.0)
      fit.off_pattern_max_z = std::max(fit.off_pattern_max_z, mag / se);
    else if (mag > 0.0)
      fit.off_pattern_max_z = std::numeric_limits<double>::infinity();
  }
  return fit;
}

}  // namespace birthmark
