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

#include "maskselect/rng.hpp"

#include <cmath>
#include <numbers>

namespace maskselect {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
  return mix64(seed ^ mix64(stream + kGolden));
}

std::uint64_t SplitMix64::next() noexcept
{
  state_ += kGolden;
  return mix64(state_);
}

double SplitMix64::uniform() noexcept
{
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) noexcept
{
  return lo + (hi - lo) * uniform();
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept
{
  // Reject the top partial bucket so every residue is equally likely.
  std::uint64_t const limit = max() - max() % bound;
  std::uint64_t       x;
  do
  {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double SplitMix64::normal() noexcept
{
  if (has_cached_normal_)
  {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  // 1 - uniform() lies in (0, 1], keeping log finite.
  double const u1     = 1.0 - uniform();
  double const u2     = uniform();
  double const radius = std::sqrt(-2.0 * std::log(u1));
  double const theta  = 2.0 * std::numbers::pi * u2;
  cached_normal_      = radius * std::sin(theta);
  has_cached_normal_  = true;
  return radius * std::cos(theta);
}

}  // namespace maskselect
