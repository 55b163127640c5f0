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

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "birthmark/errors.hpp"
#include "birthmark/rng.hpp"

namespace birthmark {

/// Monte Carlo sufficient statistics. Partial results over disjoint trial
/// ranges merge exactly (in exact arithmetic) by summing the fields.
struct EstimatorResult {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }

  double mean() const {
    return count > 0 ? sum / static_cast<double>(count)
                     : std::numeric_limits<double>::quiet_NaN();
  }

  /// Standard error of the mean; defined for count >= 2.
  double standard_error() const {
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double n = static_cast<double>(count);
    const double m = sum / n;
    const double variance = std::max(0.0, (sum_sq / n - m * m) * n / (n - 1.0));
    return std::sqrt(variance / n);
  }

  EstimatorResult& operator+=(const EstimatorResult& other) {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
    return *this;
  }

  friend EstimatorResult operator+(EstimatorResult a, const EstimatorResult& b) {
    return a += b;
  }
};

/// Pools partial results; associative and commutative up to floating-point
/// reassociation.
inline EstimatorResult merge(const std::vector<EstimatorResult>& partials) {
  if (partials.empty()) throw DomainError("merge of empty partial list");
  EstimatorResult total;
  for (const auto& p : partials) total += p;
  return total;
}

inline constexpr std::uint64_t kDefaultBatchSize = 4096;

/// Runs `trials` independent Monte Carlo trials producing K statistics each.
///
/// Trial i draws from its own stream (stream_offset + i) of the counter-based
/// generator, and trials are pre-partitioned into fixed-size batches whose
/// partial sums merge in batch order. Worker count therefore changes
/// wall-clock only, never the result.
template <std::size_t K, class TrialFn>
std::array<EstimatorResult, K> run_batched(std::uint64_t seed,
                                           std::uint64_t trials, TrialFn&& trial,
                                           int workers = 1,
                                           std::uint64_t batch_size = kDefaultBatchSize,
                                           std::uint64_t stream_offset = 0) {
  if (trials == 0) throw DomainError("trial count must be >= 1");
  if (batch_size == 0) batch_size = kDefaultBatchSize;
  const std::uint64_t num_batches = (trials + batch_size - 1) / batch_size;

  std::vector<std::array<EstimatorResult, K>> partials(num_batches);
  auto run_batch = [&](std::uint64_t b) {
    const std::uint64_t begin = b * batch_size;
    const std::uint64_t end = std::min(trials, begin + batch_size);
    auto& acc = partials[b];
    for (std::uint64_t i = begin; i < end; ++i) {
      PhiloxRng rng(seed, stream_offset + i);
      const std::array<double, K> values = trial(rng);
      for (std::size_t k = 0; k < K; ++k) acc[k].add(values[k]);
    }
  };

  const int thread_count =
      std::min<std::uint64_t>(std::max(workers, 1), num_batches);
  if (thread_count <= 1) {
    for (std::uint64_t b = 0; b < num_batches; ++b) run_batch(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= num_batches) return;
        try {
          run_batch(b);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::array<EstimatorResult, K> totals;
  for (const auto& p : partials)
    for (std::size_t k = 0; k < K; ++k) totals[k] += p[k];
  return totals;
}

namespace detail {

/// Computes batch partials (possibly in parallel) and commits them in
/// ascending batch order, so the reduction is identical for any worker
/// count. Unlike run_batched this keeps at most one partial per worker
/// alive, which matters when a partial is a dense accumulator matrix.
/// `compute(b)` may run concurrently; `commit(partial)` never does.
template <class ComputeFn, class CommitFn>
void reduce_batches_in_order(std::uint64_t num_batches, int workers,
                             ComputeFn&& compute, CommitFn&& commit) {
  if (num_batches == 0) return;
  const int thread_count = static_cast<int>(
      std::min<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)),
                              num_batches));
  if (thread_count <= 1) {
    for (std::uint64_t b = 0; b < num_batches; ++b) commit(compute(b));
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::uint64_t commit_next = 0;
  bool aborted = false;
  std::exception_ptr first_error;
  std::mutex mutex;
  std::condition_variable cv;
  auto worker = [&] {
    try {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= num_batches) return;
        auto partial = compute(b);
        std::unique_lock<std::mutex> lock(mutex);
        cv.wait(lock, [&] { return aborted || commit_next == b; });
        if (aborted) return;
        commit(std::move(partial));
        ++commit_next;
        cv.notify_all();
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(mutex);
      if (!first_error) first_error = std::current_exception();
      aborted = true;
      cv.notify_all();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (int t = 0; t < thread_count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace detail

}  // namespace birthmark
