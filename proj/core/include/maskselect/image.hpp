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

#include "maskselect/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace maskselect {

/// Interleaved 8-bit image, row-major, `channels` bytes per pixel (1 or 3).
struct Image8
{
  std::size_t               width{0};
  std::size_t               height{0};
  std::size_t               channels{3};
  std::vector<std::uint8_t> pixels;

  Image8() = default;
  Image8(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill = 0);

  std::uint8_t &at(std::size_t row, std::size_t col, std::size_t ch)
  {
    return pixels[(row * width + col) * channels + ch];
  }
  std::uint8_t at(std::size_t row, std::size_t col, std::size_t ch) const
  {
    return pixels[(row * width + col) * channels + ch];
  }

  bool operator==(Image8 const &) const = default;
};

struct ImageSize
{
  std::size_t height;
  std::size_t width;
};

/**
 * Parses binary PPM (P6) or PGM (P5) with maxval 255. Grayscale input is
 * replicated into three channels. Throws ParseError carrying the byte offset.
 */
Image8 decode_pnm(std::span<std::uint8_t const> bytes);

/// P6 for 3-channel images, P5 for 1-channel images.
std::vector<std::uint8_t> encode_pnm(Image8 const &image);

Image8 read_image8(std::filesystem::path const &path);
void   write_image(Image8 const &image, std::filesystem::path const &path);

/// Quantizes a 1 x h x w or 3 x h x w tensor in [0,1] with round-half-up and writes it.
void write_image(Tensor const &image, std::filesystem::path const &path);

/// Reads an image as a 3 x h x w tensor of p / 255, optionally nearest-neighbor resized.
Tensor read_image(std::filesystem::path const &path, std::optional<ImageSize> resize = std::nullopt);

/// Channel-major tensor with values p / 255.
Tensor to_tensor(Image8 const &image);

/// round-half-up(v * 255), clamped to [0, 255].
std::uint8_t quantize_unit(double v) noexcept;
Image8       from_tensor(Tensor const &image);

Image8 resize_nearest(Image8 const &image, ImageSize size);

}  // namespace maskselect
