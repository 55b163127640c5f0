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
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "birthmark/ensembles.hpp"
#include "birthmark/errors.hpp"
#include "birthmark/symmetry.hpp"

namespace birthmark {

/// Pairs of embedded eigenvalues must agree to this absolute tolerance.
inline constexpr double kPairTolerance = 1e-9;

/// Consecutive levels closer than this fraction of the spectral range are
/// flagged as one degeneracy cluster.
inline constexpr double kDegeneracyRelTolerance = 1e-10;

/// Index range [begin, end) of mutually degenerate levels.
struct DegeneracyCluster {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;

  Eigen::Index size() const { return end - begin; }
  bool contains(Eigen::Index i) const { return i >= begin && i < end; }
};

/// Full eigendecomposition of a sampled Hamiltonian: ascending eigenvalues,
/// orthonormal eigenvector columns, and any near-degenerate clusters.
/// Immutable after construction and safe to share across threads.
template <class Scalar>
struct HamiltonianSpectrum {
  Eigen::VectorXd eigenvalues;
  MatrixOf<Scalar> eigenvectors;
  std::vector<DegeneracyCluster> degeneracy_clusters;
  SymmetryClass symmetry = SymmetryClass::goe;
  RngKey key;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

namespace detail {

inline std::vector<DegeneracyCluster> find_clusters(
    const Eigen::VectorXd& eigenvalues) {
  std::vector<DegeneracyCluster> clusters;
  const Eigen::Index n = eigenvalues.size();
  if (n < 2) return clusters;
  const double range = eigenvalues(n - 1) - eigenvalues(0);
  const double tol = kDegeneracyRelTolerance * range;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    const bool joined = i < n && eigenvalues(i) - eigenvalues(i - 1) <= tol;
    if (!joined) {
      if (i - begin >= 2) clusters.push_back({begin, i});
      begin = i;
    }
  }
  return clusters;
}

}  // namespace detail

/// Mean gap between adjacent levels; the natural inverse-time unit.
template <class Scalar>
double mean_level_spacing(const HamiltonianSpectrum<Scalar>& spectrum) {
  const Eigen::Index n = spectrum.dim();
  if (n < 2) throw DomainError("mean level spacing needs dimension >= 2");
  return (spectrum.eigenvalues(n - 1) - spectrum.eigenvalues(0)) /
         static_cast<double>(n - 1);
}

/// Real symmetric eigendecomposition.
inline HamiltonianSpectrum<double> decompose(const RandomMatrix<double>& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.entries);
  if (solver.info() != Eigen::Success)
    throw SolverError("symmetric eigensolver failed for matrix " +
                      h.key.describe());
  HamiltonianSpectrum<double> spectrum;
  spectrum.eigenvalues = solver.eigenvalues();
  spectrum.eigenvectors = solver.eigenvectors();
  spectrum.degeneracy_clusters = detail::find_clusters(spectrum.eigenvalues);
  spectrum.symmetry = h.symmetry;
  spectrum.key = h.key;
  return spectrum;
}

/// Hermitian eigendecomposition through the real 2Nx2N embedding
/// [[X, -Y], [Y, X]] of H = X + iY. Every eigenvalue of H shows up twice in
/// the embedding; pairs are collapsed back to single complex eigenvectors
/// z = u + iv taken from one representative (u; v) per pair. Clusters that
/// are degenerate in H itself get their vectors re-orthonormalized from the
/// full set of collapsed pair members.
inline HamiltonianSpectrum<std::complex<double>> decompose(
    const RandomMatrix<std::complex<double>>& h) {
  const Eigen::Index n = h.dim();
  Eigen::MatrixXd embedded(2 * n, 2 * n);
  const Eigen::MatrixXd x = h.entries.real();
  const Eigen::MatrixXd y = h.entries.imag();
  embedded.topLeftCorner(n, n) = x;
  embedded.topRightCorner(n, n) = -y;
  embedded.bottomLeftCorner(n, n) = y;
  embedded.bottomRightCorner(n, n) = x;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(embedded);
  if (solver.info() != Eigen::Success)
    throw SolverError("embedded eigensolver failed for matrix " +
                      h.key.describe());
  const Eigen::VectorXd& doubled = solver.eigenvalues();
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  HamiltonianSpectrum<std::complex<double>> spectrum;
  spectrum.eigenvalues.resize(n);
  spectrum.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lo = doubled(2 * k);
    const double hi = doubled(2 * k + 1);
    if (hi - lo > kPairTolerance)
      throw SolverError("embedded eigenvalues failed to pair for matrix " +
                        h.key.describe());
    spectrum.eigenvalues(k) = 0.5 * (lo + hi);
    Eigen::VectorXcd z = vectors.col(2 * k).head(n).cast<std::complex<double>>() +
                         std::complex<double>(0, 1) * vectors.col(2 * k).tail(n);
    spectrum.eigenvectors.col(k) = z / z.norm();
  }
  spectrum.degeneracy_clusters = detail::find_clusters(spectrum.eigenvalues);
  spectrum.symmetry = h.symmetry;
  spectrum.key = h.key;

  // A cluster degenerate in H spans a >2-dimensional embedded eigenspace, so
  // one-per-pair representatives need not come out orthogonal. Rebuild the
  // cluster's basis from all 2m collapsed pair members.
  for (const auto& cluster : spectrum.degeneracy_clusters) {
    const Eigen::Index m = cluster.size();
    Eigen::MatrixXcd span(n, 2 * m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index pair = 2 * (cluster.begin + j);
      for (int member = 0; member < 2; ++member) {
        const auto& w = vectors.col(pair + member);
        span.col(2 * j + member) =
            w.head(n).cast<std::complex<double>>() +
            std::complex<double>(0, 1) * w.tail(n);
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(span);
    const Eigen::MatrixXcd basis =
        qr.householderQ() * Eigen::MatrixXcd::Identity(n, m);
    spectrum.eigenvectors.middleCols(cluster.begin, m) = basis;
  }
  return spectrum;
}

/// Weights of a state in the eigenbasis: p_n = |<E_n|state>|^2. The raw sum
/// must stay within 1e-10 of 1 (orthonormality contract); the output is then
/// renormalized to put it back on the simplex exactly.
template <class Scalar>
WeightVector eigen_weights(const QuantumState<Scalar>& state,
                           const HamiltonianSpectrum<Scalar>& spectrum) {
  if (state.dim() != spectrum.dim())
    throw DimensionError("state dimension " + std::to_string(state.dim()) +
                         " does not match spectrum dimension " +
                         std::to_string(spectrum.dim()));
  Eigen::VectorXd weights =
      (spectrum.eigenvectors.adjoint() * state.amplitudes()).cwiseAbs2();
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-10)
    throw SolverError("eigenbasis weights sum to " + std::to_string(total) +
                      "; eigenvector matrix is not orthonormal enough");
  return WeightVector(weights / total);
}

/// Sums weights inside each degeneracy cluster into one effective level.
/// Output length = number of effective levels; with no clusters this is the
/// input unchanged.
inline Eigen::VectorXd fold_degenerate_weights(
    const Eigen::VectorXd& weights,
    const std::vector<DegeneracyCluster>& clusters) {
  if (clusters.empty()) return weights;
  Eigen::VectorXd folded(weights.size());
  Eigen::Index out = 0;
  Eigen::Index i = 0;
  std::size_t c = 0;
  while (i < weights.size()) {
    if (c < clusters.size() && clusters[c].begin == i) {
      folded(out++) = weights.segment(i, clusters[c].size()).sum();
      i = clusters[c].end;
      ++c;
    } else {
      folded(out++) = weights(i++);
    }
  }
  return folded.head(out).eval();
}

// ---------------------------------------------------------------------------
// Binary spectrum cache: magic, dim, class, seed, stream, then little-endian
// float64 arrays (eigenvalues, eigenvector columns; complex entries stored as
// re, im). Host is assumed little-endian.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr char kSpectrumMagic[8] = {'Q', 'B', 'S', 'P',
                                           'E', 'C', 'v', '1'};

template <class T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
void read_pod(std::ifstream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace detail

template <class Scalar>
void save_spectrum(const std::string& path,
                   const HamiltonianSpectrum<Scalar>& spectrum) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OutputError("cannot open '" + path + "' for writing");
  out.write(detail::kSpectrumMagic, sizeof(detail::kSpectrumMagic));
  detail::write_pod(out, static_cast<std::uint64_t>(spectrum.dim()));
  const std::uint8_t label = is_complex(spectrum.symmetry) ? 1 : 0;
  detail::write_pod(out, label);
  detail::write_pod(out, spectrum.key.seed);
  detail::write_pod(out, spectrum.key.stream);
  out.write(reinterpret_cast<const char*>(spectrum.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double) * spectrum.dim()));
  out.write(reinterpret_cast<const char*>(spectrum.eigenvectors.data()),
            static_cast<std::streamsize>(sizeof(Scalar) * spectrum.dim() *
                                         spectrum.dim()));
  if (!out) throw OutputError("failed writing spectrum to '" + path + "'");
}

inline SymmetryClass read_spectrum_class(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kSpectrumMagic, 8) != 0)
    throw OutputError("'" + path + "' is not a spectrum dump");
  std::uint64_t dim = 0;
  detail::read_pod(in, dim);
  std::uint8_t label = 0;
  detail::read_pod(in, label);
  return label == 1 ? SymmetryClass::gue : SymmetryClass::goe;
}

template <class Scalar>
HamiltonianSpectrum<Scalar> load_spectrum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw OutputError("cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, detail::kSpectrumMagic, 8) != 0)
    throw OutputError("'" + path + "' is not a spectrum dump");
  std::uint64_t dim = 0;
  std::uint8_t label = 0;
  HamiltonianSpectrum<Scalar> spectrum;
  detail::read_pod(in, dim);
  detail::read_pod(in, label);
  detail::read_pod(in, spectrum.key.seed);
  detail::read_pod(in, spectrum.key.stream);
  spectrum.symmetry = label == 1 ? SymmetryClass::gue : SymmetryClass::goe;
  const bool complex_stored = label == 1;
  if (complex_stored != is_complex(spectrum.symmetry) ||
      complex_stored != (sizeof(Scalar) == sizeof(std::complex<double>)))
    throw OutputError("'" + path + "' holds a " +
                      std::string(complex_stored ? "GUE" : "GOE") +
                      " spectrum; wrong scalar type requested");
  const Eigen::Index n = static_cast<Eigen::Index>(dim);
  spectrum.eigenvalues.resize(n);
  spectrum.eigenvectors.resize(n, n);
  in.read(reinterpret_cast<char*>(spectrum.eigenvalues.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  in.read(reinterpret_cast<char*>(spectrum.eigenvectors.data()),
          static_cast<std::streamsize>(sizeof(Scalar) * n * n));
  if (!in) throw OutputError("unexpected end of spectrum dump '" + path + "'");
  spectrum.degeneracy_clusters = detail::find_clusters(spectrum.eigenvalues);
  return spectrum;
}

}  // namespace birthmark
