#include "maskselect/errors.hpp"
#include "maskselect/image.hpp"
#include "maskselect/rng.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <fstream>
#include <string>

using namespace maskselect;

namespace {

std::vector<std::uint8_t> bytes_of(std::string const &s)
{
  return {s.begin(), s.end()};
}

Image8 random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed)
{
  Image8     img(w, h, c);
  SplitMix64 rng(seed);
  for (auto &p : img.pixels)
  {
    p = static_cast<std::uint8_t>(rng.below(256));
  }
  return img;
}

}  // namespace

TEST_CASE("write then read restores every pixel as p/255")
{
  testing::TempDir dir;
  Image8 const     img = random_image(7, 5, 3, 1);
  write_image(img, dir / "a.ppm");
  CHECK(read_image8(dir / "a.ppm") == img);

  Tensor const t = read_image(dir / "a.ppm");
  CHECK(t.shape() == Shape{3, 5, 7});
  for (std::size_t ch = 0; ch < 3; ++ch)
  {
    for (std::size_t r = 0; r < 5; ++r)
    {
      for (std::size_t c = 0; c < 7; ++c)
      {
        CHECK(t.at(ch, r, c) == img.at(r, c, ch) / 255.0);
      }
    }
  }
  CHECK(from_tensor(t) == img);
}

TEST_CASE("grayscale files replicate to three channels")
{
  auto const img = decode_pnm(bytes_of(std::string("P5\n# comment\n2 1\n255\n") + "\x10\xf0"));
  CHECK(img.channels == 3);
  for (std::size_t ch = 0; ch < 3; ++ch)
  {
    CHECK(img.at(0, 0, ch) == 0x10);
    CHECK(img.at(0, 1, ch) == 0xf0);
  }
}

TEST_CASE("single-channel images encode as P5")
{
  Image8 const gray = random_image(3, 4, 1, 2);
  auto const   enc  = encode_pnm(gray);
  CHECK(enc[0] == 'P');
  CHECK(enc[1] == '5');
}

TEST_CASE("parse errors carry a byte offset")
{
  auto message = [](std::string const &text) -> std::pair<std::string, std::size_t> {
    try
    {
      decode_pnm(bytes_of(text));
    }
    catch (ParseError const &e)
    {
      return {e.what(), e.offset()};
    }
    return {"", 0};
  };

  auto const p3 = message("P3\n1 1\n255\n0 0 0\n");
  CHECK(p3.first.find("unsupported format P3") != std::string::npos);

  auto const maxval = message("P6\n1 1\n65535\n");
  CHECK(maxval.first.find("unsupported maxval") != std::string::npos);
  CHECK(maxval.second == 7);

  auto const truncated = message("P6\n2 2\n255\n\x01\x02\x03");
  CHECK(truncated.first.find("truncated payload") != std::string::npos);
  CHECK(truncated.second == 14);

  CHECK(message("JPEG").first.find("not a netpbm file") != std::string::npos);
}

TEST_CASE("quantization rounds half up and clamps")
{
  CHECK(quantize_unit(0.0) == 0);
  CHECK(quantize_unit(1.0) == 255);
  CHECK(quantize_unit(2.0) == 255);
  CHECK(quantize_unit(-1.0) == 0);
  CHECK(quantize_unit(0.5 / 255.0) == 1);
  CHECK(quantize_unit(127.5 / 255.0) == 128);
}

TEST_CASE("nearest-neighbor resize")
{
  Image8 img(2, 2, 1);
  img.pixels = {1, 2, 3, 4};
  auto const big = resize_nearest(img, ImageSize{4, 4});
  CHECK(big.height == 4);
  CHECK(big.at(0, 1, 0) == 1);
  CHECK(big.at(1, 2, 0) == 2);
  CHECK(big.at(3, 0, 0) == 3);
  CHECK(big.at(3, 3, 0) == 4);
  CHECK(resize_nearest(big, ImageSize{2, 2}) == img);

  testing::TempDir dir;
  write_image(random_image(10, 6, 3, 4), dir / "r.ppm");
  CHECK(read_image(dir / "r.ppm", ImageSize{8, 8}).shape() == Shape{3, 8, 8});
}

TEST_CASE("missing files are I/O errors")
{
  CHECK_THROWS_AS(read_image8("/nonexistent/x.ppm"), IoError);
}
