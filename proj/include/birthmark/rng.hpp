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

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace birthmark {

/// Counter-based random generator (Philox4x64-10, Random123 convention).
///
/// Each generator is keyed by a (seed, stream) pair; distinct streams are
/// statistically independent, which is what makes Monte Carlo batches
/// partitionable without coordination. The raw block function matches the
/// reference outputs of numpy.random.Philox (which advances its counter
/// before the first block; we start at counter zero).
class PhiloxRng {
 public:
  using result_type = std::uint64_t;

  static constexpr const char* generator_id() { return "philox4x64-10"; }

  explicit PhiloxRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{seed, stream} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  std::uint64_t seed() const { return key_[0]; }
  std::uint64_t stream() const { return key_[1]; }

  /// Next raw 64-bit word.
  result_type operator()() {
    if (cursor_ == 4) {
      block_ = block(counter_, key_);
      increment_counter();
      cursor_ = 0;
    }
    return block_[cursor_++];
  }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform double in [0, 1).
  double uniform_half_open() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller. Pairs are generated together and the
  /// spare is cached, so draw counts stay deterministic.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * kPi * uniform_half_open();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Exponential with unit rate.
  double exponential() { return -std::log(uniform()); }

  /// One Philox4x64-10 block: 4 output words from (counter, key).
  static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 4> ctr,
                                            std::array<std::uint64_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const auto [hi0, lo0] = mulhilo(kMult0, ctr[0]);
      const auto [hi1, lo1] = mulhilo(kMult1, ctr[2]);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;
  static constexpr double kPi = 3.14159265358979323846;

  static std::pair<std::uint64_t, std::uint64_t> mulhilo(std::uint64_t a,
                                                         std::uint64_t b) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    return {static_cast<std::uint64_t>(product >> 64),
            static_cast<std::uint64_t>(product)};
  }

  void increment_counter() {
    for (int i = 0; i < 4; ++i) {
      if (++counter_[i] != 0) break;
    }
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> block_{};
  int cursor_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace birthmark
