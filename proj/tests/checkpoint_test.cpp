#include "maskselect/checkpoint.hpp"
#include "maskselect/errors.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <string>

using namespace maskselect;

namespace {

std::string load_error(std::vector<std::uint8_t> const &bytes,
                       std::optional<Variant>           expected = std::nullopt)
{
  try
  {
    decode_checkpoint(bytes, expected);
  }
  catch (LoadError const &e)
  {
    return e.what();
  }
  return {};
}

void rename_tensor(std::vector<std::uint8_t> &bytes, std::string const &from, std::string const &to)
{
  REQUIRE(from.size() == to.size());
  auto it = std::search(bytes.begin(), bytes.end(), from.begin(), from.end());
  REQUIRE(it != bytes.end());
  std::copy(to.begin(), to.end(), it);
}

}  // namespace

TEST_CASE("checkpoints round trip bit-exactly")
{
  for (auto variant : {Variant::baseline, Variant::masked})
  {
    auto p = ModelParams::initialize(EncoderConfig{}, variant, 42);
    p.head_bias[0] = -0.0;
    auto const bytes = encode_checkpoint(p);
    CHECK(std::equal(bytes.begin(), bytes.begin() + 9, kCheckpointMagic));
    auto const q = decode_checkpoint(bytes);
    CHECK(bitwise_equal(p, q));
    CHECK(q.config == p.config);
    CHECK(q.variant() == variant);
  }
}

TEST_CASE("checkpoint files round trip through disk")
{
  testing::TempDir dir;
  EncoderConfig    cfg;
  cfg.block_channels = {4, 6, 8};
  auto const p       = ModelParams::initialize(cfg, Variant::masked, 3);
  save_checkpoint(p, dir / "m.bin");
  CHECK(bitwise_equal(p, load_checkpoint(dir / "m.bin")));
  CHECK_THROWS_AS(load_checkpoint(dir / "absent.bin"), IoError);
}

TEST_CASE("malformed checkpoints name the offending field")
{
  auto const bytes = encode_checkpoint(ModelParams::initialize(EncoderConfig{}, Variant::masked, 1));

  SUBCASE("corrupted magic")
  {
    auto bad = bytes;
    bad[0]   = 'X';
    CHECK(load_error(bad) == "bad magic");
    CHECK(load_error({}) == "bad magic");
  }
  SUBCASE("truncated tensor data")
  {
    auto bad = bytes;
    bad.resize(bad.size() - 4);
    auto const msg = load_error(bad);
    CHECK(msg.find("truncated") != std::string::npos);
    CHECK(msg.find("head.bias") != std::string::npos);
  }
  SUBCASE("trailing bytes")
  {
    auto bad = bytes;
    bad.push_back(0);
    CHECK(load_error(bad).find("trailing bytes") != std::string::npos);
  }
  SUBCASE("unknown tensor")
  {
    auto bad = bytes;
    rename_tensor(bad, "mask.logits", "mask.logitz");
    CHECK(load_error(bad) == "unknown tensor \"mask.logitz\"");
  }
  SUBCASE("missing tensor")
  {
    auto bad = bytes;
    rename_tensor(bad, "head.bias", "head.xias");
    CHECK(load_error(bad).find("missing tensor \"head.bias\"") != std::string::npos);
  }
  SUBCASE("masked checkpoint loaded for a baseline")
  {
    CHECK(load_error(bytes, Variant::baseline).find("unexpected tensor \"mask.logits\"") !=
          std::string::npos);
  }
  SUBCASE("baseline checkpoint loaded as masked")
  {
    auto const base = encode_checkpoint(ModelParams::initialize(EncoderConfig{}, Variant::baseline, 1));
    CHECK(load_error(base, Variant::masked).find("mask.logits") != std::string::npos);
  }
}
