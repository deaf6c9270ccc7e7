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

#include "maskselect/noise.hpp"

#include "maskselect/errors.hpp"
#include "maskselect/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace maskselect {

std::string_view to_string(NoiseKind kind) noexcept
{
  return kind == NoiseKind::gaussian ? "gaussian" : "salt_pepper";
}

NoiseKind parse_noise_kind(std::string_view text)
{
  if (text == "gaussian")
  {
    return NoiseKind::gaussian;
  }
  if (text == "salt_pepper" || text == "salt-pepper")
  {
    return NoiseKind::salt_pepper;
  }
  throw InputError("unknown noise kind '" + std::string(text) + "'");
}

void NoiseSpec::validate() const
{
  if (!(level >= 0.0) || !std::isfinite(level))
  {
    throw InputError("noise level must be a finite nonnegative number");
  }
  if (kind == NoiseKind::salt_pepper && level > 1.0)
  {
    throw InputError("salt-and-pepper ratio must not exceed 1");
  }
}

Image8 add_gaussian_noise(Image8 const &image, double level, std::uint64_t seed,
                          bool level_is_stddev)
{
  NoiseSpec{NoiseKind::gaussian, level, seed}.validate();
  if (level == 0.0)
  {
    return image;
  }
  double const sigma = level_is_stddev ? level : std::sqrt(level);
  SplitMix64   rng(seed);
  Image8       out = image;
  for (auto &p : out.pixels)
  {
    double const v = std::round(static_cast<double>(p) + sigma * rng.normal());
    p              = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
  }
  return out;
}

Image8 add_salt_pepper_noise(Image8 const &image, double ratio, std::uint64_t seed)
{
  NoiseSpec{NoiseKind::salt_pepper, ratio, seed}.validate();
  std::size_t const n_pixels = image.width * image.height;
  auto const        count    = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n_pixels)));
  if (count == 0)
  {
    return image;
  }

  SplitMix64               rng(seed);
  std::vector<std::size_t> order(n_pixels);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Image8 out = image;
  for (std::size_t i = 0; i < count; ++i)
  {
    auto const j = i + static_cast<std::size_t>(rng.below(n_pixels - i));
    std::swap(order[i], order[j]);
    std::uint8_t const value = rng.coin() ? 255 : 0;
    for (std::size_t c = 0; c < out.channels; ++c)
    {
      out.pixels[order[i] * out.channels + c] = value;
    }
  }
  return out;
}

Image8 apply_noise(Image8 const &image, NoiseSpec const &spec, bool level_is_stddev)
{
  if (spec.kind == NoiseKind::gaussian)
  {
    return add_gaussian_noise(image, spec.level, spec.seed, level_is_stddev);
  }
  return add_salt_pepper_noise(image, spec.level, spec.seed);
}

}  // namespace maskselect
