//------------------------------------------------------------------------------
//
//   Copyright 2026 The maskselect Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace maskselect {

/**
 * SplitMix64 generator.
 *
 * State advances by the golden-ratio increment 0x9E3779B97F4A7C15 and each
 * output is the state passed through the SplitMix64 finalizer
 * (xor-shift 30/27/31 with multipliers 0xBF58476D1CE4E5B9, 0x94D049BB133111EB).
 * All derived draws (uniform doubles, bounded integers, normals) are defined
 * here rather than through <random> distributions so sequences are identical
 * on every platform and standard library.
 */
class SplitMix64
{
public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) noexcept
    : state_(seed)
  {}

  std::uint64_t next() noexcept;
  std::uint64_t operator()() noexcept
  {
    return next();
  }
  static constexpr std::uint64_t min() noexcept
  {
    return 0;
  }
  static constexpr std::uint64_t max() noexcept
  {
    return ~std::uint64_t{0};
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() noexcept;
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) noexcept;
  /// Uniform integer in [0, bound), bias-free by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;
  bool   coin() noexcept
  {
    return (next() >> 63) != 0;
  }

  template <typename T>
  void shuffle(std::span<T> items) noexcept
  {
    // Fisher-Yates, high index first.
    for (std::size_t i = items.size(); i > 1; --i)
    {
      auto const j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const noexcept
  {
    return state_;
  }

private:
  std::uint64_t state_;
  double        cached_normal_{0.0};
  bool          has_cached_normal_{false};
};

/// SplitMix64 finalizer applied to a single value.
std::uint64_t mix64(std::uint64_t value) noexcept;

/**
 * Seed for an independent stream: mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15)).
 * Used for per-image, per-level and per-purpose generators.
 */
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace maskselect
