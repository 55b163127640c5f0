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
// Time-domain side of the story: the running average of the transition
// probability |<b|exp(-iHt)|a>|^2 over [0, T] converges to the spectral sum
// sum_n p_n^a p_n^b as T grows. The finite-T average has a closed form, each
// phase pair contributing the exact kernel
//     kappa(x) = (exp(-ix) - 1)/(-ix),  x = (E_n - E_m) T,
// so no quadrature enters the primary path; a quadrature cross-check lives in
// the tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/spectral.hpp"

namespace birthmark {

inline constexpr double kKernelSeriesCutoff = 1e-6;

/// The phase factor exp(-i x s) averaged over s in [0, 1]; evaluated by
/// series near zero to avoid cancellation.
inline std::complex<double> time_average_kernel(double x) {
  if (std::abs(x) < kKernelSeriesCutoff)
    return {1.0 - x * x / 6.0, -x / 2.0};
  const std::complex<double> num =
      std::complex<double>(std::cos(x) - 1.0, -std::sin(x));
  return num / std::complex<double>(0.0, -x);
}

namespace detail {

template <class Scalar>
VectorOf<std::complex<double>> pair_amplitudes(
    const HamiltonianSpectrum<Scalar>& spectrum, const QuantumState<Scalar>& a,
    const QuantumState<Scalar>& b) {
  if (a.dim() != spectrum.dim() || b.dim() != spectrum.dim())
    throw DimensionError("state dimensions " + std::to_string(a.dim()) + ", " +
                         std::to_string(b.dim()) +
                         " do not match spectrum dimension " +
                         std::to_string(spectrum.dim()));
  const VectorOf<Scalar> an = spectrum.eigenvectors.adjoint() * a.amplitudes();
  const VectorOf<Scalar> bn = spectrum.eigenvectors.adjoint() * b.amplitudes();
  VectorOf<std::complex<double>> w(an.size());
  for (Eigen::Index i = 0; i < an.size(); ++i)
    w[i] = std::complex<double>(std::conj(bn[i])) * std::complex<double>(an[i]);
  return w;
}

}  // namespace detail

/// |<b|exp(-iHt)|a>|^2 evaluated through the eigendecomposition.
template <class Scalar>
double overlap_at_time(const HamiltonianSpectrum<Scalar>& spectrum,
                       const QuantumState<Scalar>& a,
                       const QuantumState<Scalar>& b, double t) {
  if (!std::isfinite(t)) throw DomainError("time must be finite");
  const auto w = detail::pair_amplitudes(spectrum, a, b);
  std::complex<double> amp = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double phase = -spectrum.eigenvalues[i] * t;
    amp += w[i] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return std::norm(amp);
}

/// (1/T) integral_0^T |<b|exp(-iHt)|a>|^2 dt in closed form. Degenerate
/// pairs enter with kernel value 1 exactly, which is the folded-weight
/// prescription of the long-time limit.
template <class Scalar>
double finite_time_average(const HamiltonianSpectrum<Scalar>& spectrum,
                           const QuantumState<Scalar>& a,
                           const QuantumState<Scalar>& b, double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw DomainError("averaging horizon must be positive and finite");
  const auto w = detail::pair_amplitudes(spectrum, a, b);
  const Eigen::Index n = w.size();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) total += std::norm(w[i]);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double gap = spectrum.eigenvalues[i] - spectrum.eigenvalues[j];
      const std::complex<double> kernel = time_average_kernel(gap * horizon);
      total += 2.0 * std::real(w[i] * std::conj(w[j]) * kernel);
    }
  return std::max(0.0, total);
}

/// Finite-time averages over a ladder of horizons, against the exact
/// long-time limit. Horizons are in units of the inverse mean level spacing;
/// physical times are horizon/mean_gap.
struct TimeAverageCurve {
  std::vector<double> horizons;  // in mean-gap units, strictly increasing
  std::vector<double> values;    // finite-time averages
  std::vector<double> envelope;  // running max of |value - limit| over the tail
  double limit = 0.0;            // exact T -> infinity value
  double mean_gap = 0.0;         // converts horizons to physical time

  double abs_error(std::size_t i) const {
    return std::abs(values[i] - limit);
  }
};

/// Evaluates the convergence of the running average toward the spectral sum.
/// The limit accounts for degenerate clusters exactly: each cluster
/// contributes |sum of its pair amplitudes|^2.
template <class Scalar>
TimeAverageCurve convergence_curve(const HamiltonianSpectrum<Scalar>& spectrum,
                                   const QuantumState<Scalar>& a,
                                   const QuantumState<Scalar>& b,
                                   const std::vector<double>& horizons) {
  if (horizons.empty()) throw DomainError("need at least one horizon");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0))
      throw DomainError("horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw DomainError("horizons must be strictly increasing");
  }

  const auto w = detail::pair_amplitudes(spectrum, a, b);
  TimeAverageCurve curve;
  curve.horizons = horizons;
  curve.mean_gap = mean_level_spacing(spectrum);

  // Long-time limit: diagonal terms plus the surviving cross terms inside
  // each degenerate cluster.
  std::vector<bool> clustered(static_cast<std::size_t>(w.size()), false);
  for (const auto& cluster : spectrum.degeneracy_clusters) {
    std::complex<double> block = 0.0;
    for (Eigen::Index i = cluster.begin; i < cluster.end; ++i) {
      block += w[i];
      clustered[static_cast<std::size_t>(i)] = true;
    }
    curve.limit += std::norm(block);
  }
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!clustered[static_cast<std::size_t>(i)]) curve.limit += std::norm(w[i]);

  curve.values.reserve(horizons.size());
  for (const double h : horizons)
    curve.values.push_back(
        finite_time_average(spectrum, a, b, h / curve.mean_gap));

  curve.envelope.resize(horizons.size());
  double running = 0.0;
  for (std::size_t i = horizons.size(); i-- > 0;) {
    running = std::max(running, std::abs(curve.values[i] - curve.limit));
    curve.envelope[i] = running;
  }
  return curve;
}

}  // namespace birthmark
