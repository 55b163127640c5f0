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

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>

#include "birthmark/errors.hpp"
#include "birthmark/rng.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

template <class Scalar>
using VectorOf = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using MatrixOf = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Absolute tolerance on unit-norm and unit-sum contracts.
inline constexpr double kNormTolerance = 1e-12;

/// Identifies the (seed, stream) a sampled object came from, so failures can
/// be reproduced.
struct RngKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::string describe() const {
    return "seed=" + std::to_string(seed) + " stream=" + std::to_string(stream);
  }
};

/// A sampled GOE/GUE member: exactly symmetric (real) or exactly Hermitian
/// (complex) by construction. Convention: H = (A + A^dagger) / (2 sqrt(N))
/// with A i.i.d. standard Gaussian, which puts the spectrum on an O(1)
/// support (semicircle radius sqrt(2)).
template <class Scalar>
struct RandomMatrix {
  MatrixOf<Scalar> entries;
  SymmetryClass symmetry = SymmetryClass::goe;
  RngKey key;

  Eigen::Index dim() const { return entries.rows(); }
};

/// Unit vector of amplitudes; real for GOE, complex for GUE.
template <class Scalar>
class QuantumState {
 public:
  explicit QuantumState(VectorOf<Scalar> amplitudes)
      : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0)
      throw DimensionError("quantum state must have dimension >= 1");
    const double norm_sq = amplitudes_.squaredNorm();
    if (std::abs(norm_sq - 1.0) > kNormTolerance)
      throw NormalizationError("state squared norm " + std::to_string(norm_sq) +
                               " deviates from 1 beyond tolerance");
  }

  const VectorOf<Scalar>& amplitudes() const { return amplitudes_; }
  Eigen::Index dim() const { return amplitudes_.size(); }

 private:
  VectorOf<Scalar> amplitudes_;
};

/// Nonnegative weights summing to 1: the Dirichlet-distributed object
/// p_j = |c_j|^2 that every long-time average is built from.
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0)
      throw DimensionError("weight vector must have dimension >= 1");
    if (weights_.minCoeff() < 0.0)
      throw DomainError("weight vector has a negative entry");
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > kNormTolerance)
      throw NormalizationError("weights sum to " + std::to_string(total) +
                               ", not 1 within tolerance");
  }

  const Eigen::VectorXd& values() const { return weights_; }
  Eigen::Index dim() const { return weights_.size(); }

 private:
  Eigen::VectorXd weights_;
};

namespace detail {

inline double gaussian_scalar(PhiloxRng& rng, double*) { return rng.gaussian(); }

inline std::complex<double> gaussian_scalar(PhiloxRng& rng,
                                            std::complex<double>*) {
  // Unit total variance: Re and Im each N(0, 1/2).
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double re = rng.gaussian();
  const double im = rng.gaussian();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

template <class Scalar>
VectorOf<Scalar> gaussian_vector(Eigen::Index n, PhiloxRng& rng) {
  VectorOf<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v(i) = gaussian_scalar(rng, static_cast<Scalar*>(nullptr));
  return v;
}

template <class Scalar>
MatrixOf<Scalar> gaussian_matrix(Eigen::Index n, PhiloxRng& rng) {
  MatrixOf<Scalar> m(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      m(i, j) = gaussian_scalar(rng, static_cast<Scalar*>(nullptr));
  return m;
}

inline void require_dim(Eigen::Index n) {
  if (n < 1) throw DimensionError("dimension must be >= 1");
}

}  // namespace detail

/// Draws one GOE/GUE matrix. Symmetrization (A + A^dagger)/2 makes the
/// result exactly self-adjoint entrywise in floating point.
template <SymmetryClass C>
RandomMatrix<field_of_t<C>> sample_matrix(Eigen::Index n, PhiloxRng& rng) {
  detail::require_dim(n);
  using Scalar = field_of_t<C>;
  MatrixOf<Scalar> a = detail::gaussian_matrix<Scalar>(n, rng);
  const double scale = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  MatrixOf<Scalar> h = (a + a.adjoint()) * scale;
  // Symmetrize the diagonal of the complex case exactly (imag parts cancel).
  if constexpr (C == SymmetryClass::gue) {
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) = Scalar(h(i, i).real(), 0.0);
  }
  return {std::move(h), C, {rng.seed(), rng.stream()}};
}

template <SymmetryClass C>
RandomMatrix<field_of_t<C>> sample_matrix(Eigen::Index n, std::uint64_t seed,
                                          std::uint64_t stream = 0) {
  PhiloxRng rng(seed, stream);
  return sample_matrix<C>(n, rng);
}

/// Haar-random unit vector on the real (GOE) or complex (GUE) sphere.
template <SymmetryClass C>
QuantumState<field_of_t<C>> sample_haar_state(Eigen::Index n, PhiloxRng& rng) {
  detail::require_dim(n);
  using Scalar = field_of_t<C>;
  VectorOf<Scalar> v = detail::gaussian_vector<Scalar>(n, rng);
  double norm = v.norm();
  while (norm == 0.0) {  // essentially impossible, but keeps the contract total
    v = detail::gaussian_vector<Scalar>(n, rng);
    norm = v.norm();
  }
  return QuantumState<Scalar>(v / norm);
}

template <SymmetryClass C>
QuantumState<field_of_t<C>> sample_haar_state(Eigen::Index n, std::uint64_t seed,
                                              std::uint64_t stream = 0) {
  PhiloxRng rng(seed, stream);
  return sample_haar_state<C>(n, rng);
}

/// Weight vector distributed Dir(alpha, ..., alpha) with the class alpha,
/// built by normalizing independent Gamma variates. Gamma(1) is an
/// exponential draw and Gamma(1/2) is half a squared standard normal, so no
/// general Gamma sampler is needed.
inline WeightVector sample_dirichlet(SymmetryClass c, Eigen::Index n,
                                     PhiloxRng& rng) {
  detail::require_dim(n);
  Eigen::VectorXd g(n);
  double total = 0.0;
  do {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (c == SymmetryClass::gue) {
        g(i) = rng.exponential();
      } else {
        const double z = rng.gaussian();
        g(i) = 0.5 * z * z;
      }
    }
    total = g.sum();
  } while (total == 0.0);
  return WeightVector(g / total);
}

inline WeightVector sample_dirichlet(SymmetryClass c, Eigen::Index n,
                                     std::uint64_t seed,
                                     std::uint64_t stream = 0) {
  PhiloxRng rng(seed, stream);
  return sample_dirichlet(c, n, rng);
}

/// p_j = |c_j|^2. The sum inherits the state's normalization.
template <class Scalar>
WeightVector weights_from_state(const QuantumState<Scalar>& state) {
  const double norm_sq = state.amplitudes().squaredNorm();
  if (std::abs(norm_sq - 1.0) > kNormTolerance)
    throw NormalizationError("state not normalized");
  return WeightVector(state.amplitudes().cwiseAbs2());
}

/// Calls f with std::integral_constant<SymmetryClass, c>; lets runtime
/// class labels reach the templated samplers with a single branch.
template <class F>
decltype(auto) with_symmetry(SymmetryClass c, F&& f) {
  if (c == SymmetryClass::gue)
    return std::forward<F>(f)(
        std::integral_constant<SymmetryClass, SymmetryClass::gue>{});
  return std::forward<F>(f)(
      std::integral_constant<SymmetryClass, SymmetryClass::goe>{});
}

}  // namespace birthmark
