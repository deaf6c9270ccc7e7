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

#include "maskselect/image.hpp"

#include "maskselect/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>

namespace maskselect {

Image8::Image8(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill)
  : width(w)
  , height(h)
  , channels(c)
  , pixels(w * h * c, fill)
{}

namespace {

class HeaderScanner
{
public:
  explicit HeaderScanner(std::span<std::uint8_t const> bytes)
    : bytes_(bytes)
  {}

  void skip_space_and_comments()
  {
    while (pos_ < bytes_.size())
    {
      if (bytes_[pos_] == '#')
      {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
        {
          ++pos_;
        }
      }
      else if (std::isspace(bytes_[pos_]))
      {
        ++pos_;
      }
      else
      {
        break;
      }
    }
  }

  std::size_t number(char const *field)
  {
    skip_space_and_comments();
    std::size_t const start = pos_;
    std::size_t       value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]))
    {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 24))
      {
        throw ParseError(std::string(field) + " too large", start);
      }
      ++pos_;
    }
    if (pos_ == start)
    {
      throw ParseError(std::string("expected ") + field, pos_);
    }
    return value;
  }

  /// Exactly one whitespace byte separates the header from the raster.
  void single_space()
  {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
    {
      throw ParseError("expected whitespace before pixel data", pos_);
    }
    ++pos_;
  }

  std::size_t pos() const noexcept
  {
    return pos_;
  }
  void advance(std::size_t n) noexcept
  {
    pos_ += n;
  }

private:
  std::span<std::uint8_t const> bytes_;
  std::size_t                   pos_{0};
};

std::vector<std::uint8_t> slurp(std::filesystem::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw IoError("cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spill(std::vector<std::uint8_t> const &bytes, std::filesystem::path const &path)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<char const *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
  {
    throw IoError("failed writing " + path.string());
  }
}

}  // namespace

Image8 decode_pnm(std::span<std::uint8_t const> bytes)
{
  if (bytes.size() < 2 || bytes[0] != 'P')
  {
    throw ParseError("not a netpbm file", 0);
  }
  char const kind = static_cast<char>(bytes[1]);
  if (kind != '5' && kind != '6')
  {
    throw ParseError(std::string("unsupported format P") + kind, 0);
  }
  HeaderScanner scan(bytes);
  scan.advance(2);
  std::size_t const width  = scan.number("width");
  std::size_t const height = scan.number("height");
  scan.skip_space_and_comments();
  std::size_t const maxval_at = scan.pos();
  std::size_t const maxval = scan.number("maxval");
  if (width == 0 || height == 0)
  {
    throw ParseError("image dimensions must be positive", maxval_at);
  }
  if (maxval != 255)
  {
    throw ParseError("unsupported maxval " + std::to_string(maxval), maxval_at);
  }
  scan.single_space();

  std::size_t const file_channels = kind == '6' ? 3 : 1;
  std::size_t const payload       = width * height * file_channels;
  std::size_t const start         = scan.pos();
  if (bytes.size() - start < payload)
  {
    throw ParseError("truncated payload: expected " + std::to_string(payload) + " bytes, found " +
                         std::to_string(bytes.size() - start),
                     bytes.size());
  }

  Image8 image(width, height, 3);
  if (file_channels == 3)
  {
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(start),
              bytes.begin() + static_cast<std::ptrdiff_t>(start + payload), image.pixels.begin());
  }
  else
  {
    for (std::size_t i = 0; i < width * height; ++i)
    {
      std::uint8_t const v  = bytes[start + i];
      image.pixels[3 * i]     = v;
      image.pixels[3 * i + 1] = v;
      image.pixels[3 * i + 2] = v;
    }
  }
  return image;
}

std::vector<std::uint8_t> encode_pnm(Image8 const &image)
{
  if (image.channels != 1 && image.channels != 3)
  {
    throw InputError("netpbm output needs 1 or 3 channels, got " + std::to_string(image.channels));
  }
  if (image.pixels.size() != image.width * image.height * image.channels)
  {
    throw ShapeError("pixel buffer does not match image dimensions");
  }
  std::string const header = std::string(image.channels == 3 ? "P6" : "P5") + "\n" +
                             std::to_string(image.width) + " " + std::to_string(image.height) +
                             "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels.begin(), image.pixels.end());
  return out;
}

Image8 read_image8(std::filesystem::path const &path)
{
  auto const bytes = slurp(path);
  try
  {
    return decode_pnm(bytes);
  }
  catch (ParseError const &err)
  {
    throw ParseError(path.string() + ": " + err.what(), err.offset());
  }
}

void write_image(Image8 const &image, std::filesystem::path const &path)
{
  spill(encode_pnm(image), path);
}

void write_image(Tensor const &image, std::filesystem::path const &path)
{
  write_image(from_tensor(image), path);
}

Tensor read_image(std::filesystem::path const &path, std::optional<ImageSize> resize)
{
  Image8 image = read_image8(path);
  if (resize)
  {
    image = resize_nearest(image, *resize);
  }
  return to_tensor(image);
}

Tensor to_tensor(Image8 const &image)
{
  std::size_t const plane = image.width * image.height;
  Tensor            out({image.channels, image.height, image.width});
  for (std::size_t i = 0; i < plane; ++i)
  {
    for (std::size_t c = 0; c < image.channels; ++c)
    {
      out[c * plane + i] = image.pixels[i * image.channels + c] / 255.0;
    }
  }
  return out;
}

std::uint8_t quantize_unit(double v) noexcept
{
  double const scaled = std::floor(v * 255.0 + 0.5);
  if (!(scaled > 0.0))
  {
    return 0;
  }
  if (scaled >= 255.0)
  {
    return 255;
  }
  return static_cast<std::uint8_t>(scaled);
}

Image8 from_tensor(Tensor const &image)
{
  if (image.rank() != 3 || (image.dim(0) != 1 && image.dim(0) != 3))
  {
    throw ShapeError("image tensor must be 1 x h x w or 3 x h x w, got " +
                     shape_to_string(image.shape()));
  }
  std::size_t const c = image.dim(0);
  std::size_t const h = image.dim(1);
  std::size_t const w = image.dim(2);
  Image8            out(w, h, c);
  for (std::size_t i = 0; i < h * w; ++i)
  {
    for (std::size_t ch = 0; ch < c; ++ch)
    {
      out.pixels[i * c + ch] = quantize_unit(image[ch * h * w + i]);
    }
  }
  return out;
}

Image8 resize_nearest(Image8 const &image, ImageSize size)
{
  if (size.height == 0 || size.width == 0)
  {
    throw InputError("resize target must be positive");
  }
  Image8 out(size.width, size.height, image.channels);
  for (std::size_t r = 0; r < size.height; ++r)
  {
    std::size_t const sr = r * image.height / size.height;
    for (std::size_t c = 0; c < size.width; ++c)
    {
      std::size_t const sc = c * image.width / size.width;
      for (std::size_t ch = 0; ch < image.channels; ++ch)
      {
        out.at(r, c, ch) = image.at(sr, sc, ch);
      }
    }
  }
  return out;
}

}  // namespace maskselect
