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

#include "maskselect/image.hpp"

#include <cstdint>
#include <string_view>

namespace maskselect {

enum class NoiseKind
{
  gaussian,
  salt_pepper,
};

std::string_view to_string(NoiseKind kind) noexcept;
NoiseKind        parse_noise_kind(std::string_view text);

struct NoiseSpec
{
  NoiseKind     kind{NoiseKind::gaussian};
  double        level{0.0};
  std::uint64_t seed{0};

  /// level >= 0, and level <= 1 for salt-and-pepper; throws InputError otherwise.
  void validate() const;
};

/**
 * Adds zero-mean Gaussian noise to every channel of every pixel, then clamps
 * to [0, 255] and rounds to the nearest integer. `level` is the variance in
 * 8-bit intensity units, or the standard deviation when `level_is_stddev`.
 * Level 0 returns the input unchanged.
 */
Image8 add_gaussian_noise(Image8 const &image, double level, std::uint64_t seed,
                          bool level_is_stddev = false);

/**
 * Sets round(ratio * width * height) distinct pixels to black or white (all
 * channels, each with probability 1/2). Positions are drawn without
 * replacement by a partial Fisher-Yates shuffle.
 */
Image8 add_salt_pepper_noise(Image8 const &image, double ratio, std::uint64_t seed);

Image8 apply_noise(Image8 const &image, NoiseSpec const &spec, bool level_is_stddev = false);

}  // namespace maskselect
