#include "maskselect/errors.hpp"
#include "maskselect/noise.hpp"
#include "maskselect/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace maskselect;

namespace {

Image8 textured(std::size_t w, std::size_t h, std::uint64_t seed)
{
  Image8     img(w, h, 3);
  SplitMix64 rng(seed);
  for (auto &p : img.pixels)
  {
    p = static_cast<std::uint8_t>(rng.below(256));
  }
  return img;
}

struct Moments
{
  double mean;
  double variance;
};

Moments difference_moments(Image8 const &out, Image8 const &in)
{
  double      sum = 0.0, sq = 0.0;
  std::size_t n   = in.pixels.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    double const d = static_cast<double>(out.pixels[i]) - static_cast<double>(in.pixels[i]);
    sum += d;
    sq += d * d;
  }
  double const mean = sum / static_cast<double>(n);
  return {mean, sq / static_cast<double>(n) - mean * mean};
}

std::size_t changed_positions(Image8 const &out, Image8 const &in)
{
  std::size_t count = 0;
  for (std::size_t r = 0; r < in.height; ++r)
  {
    for (std::size_t c = 0; c < in.width; ++c)
    {
      bool diff = false;
      for (std::size_t ch = 0; ch < in.channels; ++ch)
      {
        diff = diff || out.at(r, c, ch) != in.at(r, c, ch);
      }
      count += diff ? 1 : 0;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("zero-level noise is the identity")
{
  Image8 const img = textured(31, 17, 1);
  CHECK(add_gaussian_noise(img, 0.0, 99) == img);
  CHECK(add_gaussian_noise(img, 0.0, 99, true) == img);
  CHECK(add_salt_pepper_noise(img, 0.0, 99) == img);
}

TEST_CASE("gaussian level is a variance on the 0-255 scale")
{
  Image8 const flat(100, 100, 3, 128);
  auto const   m = difference_moments(add_gaussian_noise(flat, 25.0, 7), flat);
  CHECK(std::abs(m.mean) <= 0.5);
  CHECK(m.variance >= 25.0 * 0.8);
  CHECK(m.variance <= 25.0 * 1.2);

  auto const s = difference_moments(add_gaussian_noise(flat, 25.0, 7, true), flat);
  CHECK(s.variance >= 625.0 * 0.8);
  CHECK(s.variance <= 625.0 * 1.2);
}

TEST_CASE("gaussian noise clamps at the intensity limits")
{
  Image8 const white(64, 64, 3, 255);
  auto const   out = add_gaussian_noise(white, 400.0, 3);
  bool         any_below = false;
  for (auto p : out.pixels)
  {
    any_below = any_below || p < 255;
  }
  CHECK(any_below);
  Image8 const black(64, 64, 3, 0);
  auto const   dark = add_gaussian_noise(black, 400.0, 3);
  CHECK(dark.pixels.size() == black.pixels.size());
}

TEST_CASE("salt and pepper corrupts an exact number of distinct positions")
{
  Image8 const flat(224, 224, 3, 128);
  auto const   out = add_salt_pepper_noise(flat, 0.005, 11);
  CHECK(changed_positions(out, flat) == 251);
  for (std::size_t r = 0; r < 224; ++r)
  {
    for (std::size_t c = 0; c < 224; ++c)
    {
      if (out.at(r, c, 0) != 128)
      {
        auto const v = out.at(r, c, 0);
        CHECK((v == 0 || v == 255));
        CHECK(out.at(r, c, 1) == v);
        CHECK(out.at(r, c, 2) == v);
      }
    }
  }
  for (double ratio : {0.001, 0.002, 0.003, 0.004, 0.3, 1.0})
  {
    auto const n = static_cast<std::size_t>(std::llround(ratio * 224 * 224));
    CHECK(changed_positions(add_salt_pepper_noise(flat, ratio, 5), flat) == n);
  }
}

TEST_CASE("noise depends only on its inputs and seed")
{
  Image8 const img = textured(32, 32, 2);
  CHECK(add_gaussian_noise(img, 10.0, 4) == add_gaussian_noise(img, 10.0, 4));
  CHECK_FALSE(add_gaussian_noise(img, 10.0, 4) == add_gaussian_noise(img, 10.0, 5));
  CHECK(add_salt_pepper_noise(img, 0.01, 4) == add_salt_pepper_noise(img, 0.01, 4));
  NoiseSpec const spec{NoiseKind::salt_pepper, 0.01, 4};
  CHECK(apply_noise(img, spec) == add_salt_pepper_noise(img, 0.01, 4));
}

TEST_CASE("noise parameters are validated")
{
  CHECK_THROWS_AS(add_gaussian_noise(Image8(2, 2, 3), -1.0, 0), InputError);
  CHECK_THROWS_AS(add_salt_pepper_noise(Image8(2, 2, 3), 1.5, 0), InputError);
  CHECK(parse_noise_kind("salt_pepper") == NoiseKind::salt_pepper);
  CHECK(to_string(NoiseKind::gaussian) == "gaussian");
  CHECK_THROWS_AS(parse_noise_kind("speckle"), InputError);
}
