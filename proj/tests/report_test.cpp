#include "maskselect/errors.hpp"
#include "maskselect/report.hpp"
#include "maskselect/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace maskselect;

TEST_CASE("aggregate of an all-equal list has zero spread")
{
  auto const r = aggregate_report({0.9, 0.9, 0.9, 0.9, 0.9});
  CHECK(r.mean == 0.9);
  CHECK(r.stddev == 0.0);
  CHECK(r.min == 0.9);
  CHECK(r.table_row() == "0.900 ± 0 | 0.900");
}

TEST_CASE("aggregate uses the population standard deviation")
{
  auto const r = aggregate_report({1, 0, 0, 0, 0});
  CHECK(r.mean == 0.2);
  CHECK(r.stddev == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.min == 0.0);
}

TEST_CASE("aggregate agrees with a long-double recomputation")
{
  SplitMix64 rng(3);
  for (int trial = 0; trial < 500; ++trial)
  {
    std::vector<double> acc(5);
    for (auto &a : acc)
    {
      a = static_cast<double>(rng.below(161)) / 160.0;
    }
    long double sum = 0;
    for (auto a : acc)
    {
      sum += a;
    }
    long double const mean = sum / 5;
    long double       ss   = 0;
    for (auto a : acc)
    {
      ss += (a - mean) * (a - mean);
    }
    auto const r = aggregate_report(acc);
    CHECK(std::abs(r.mean - static_cast<double>(mean)) <= 1e-15);
    CHECK(std::abs(r.stddev - static_cast<double>(std::sqrt(ss / 5))) <= 1e-15);
    CHECK(r.min == *std::min_element(acc.begin(), acc.end()));
  }
}

TEST_CASE("aggregate rejects malformed input")
{
  CHECK_THROWS_AS(aggregate_report({0.9, 0.9}), InputError);
  CHECK_THROWS_AS(aggregate_report({0.9, 0.9, 0.9, 0.9, 0.9, 0.9}), InputError);
  CHECK_THROWS_AS(aggregate_report({0.9, 0.9, 0.9, 0.9, 1.1}), InputError);
}

TEST_CASE("table rows print mean, compact spread and minimum")
{
  CHECK(format_spread(7.5e-4) == "7.5e-4");
  CHECK(format_spread(0.0) == "0");
  CHECK(format_spread(0.012) == "1.2e-2");
  RunReport r;
  r.mean   = 0.9;
  r.stddev = 7.5e-4;
  r.min    = 0.9;
  CHECK(r.table_row() == "0.900 ± 7.5e-4 | 0.900");
}

TEST_CASE("config digests are stable and sensitive")
{
  TrainConfig a;
  TrainConfig b;
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  b.lambda = 0.0;
  CHECK(config_digest(a) != config_digest(b));
  b        = a;
  b.seed   = 4;
  CHECK(config_digest(a) == config_digest(b));
}

TEST_CASE("mask report statistics")
{
  auto p = ModelParams::initialize(EncoderConfig{}, Variant::masked, 1);
  auto r = mask_report(p);
  CHECK(std::abs(r.mean - 0.9) <= 1e-6);
  CHECK(r.suppressed == 0);

  p.mask->logits.fill(-40.0);
  r = mask_report(p);
  CHECK(r.suppressed == 64);

  auto const csv = r.to_csv();
  CHECK(csv.rfind("kind,row,col,value\ncell,0,0,", 0) == 0);
  CHECK(csv.find("\nsuppressed_count,,,64\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 64 + 2);

  try
  {
    mask_report(ModelParams::initialize(EncoderConfig{}, Variant::baseline, 1));
    FAIL("expected an error");
  }
  catch (InputError const &e)
  {
    CHECK(std::string(e.what()) == "model has no mask");
  }
}
