#include "maskselect/errors.hpp"
#include "maskselect/sweep.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <stdexcept>

using namespace maskselect;
using namespace maskselect::testing;

namespace {

LoadedDataset const &shared_data()
{
  static TempDir       dir;
  static LoadedDataset data = tiny_dataset(dir.path(), 11);
  return data;
}

std::vector<NamedModel> two_models()
{
  auto const cfg = encoder_config_for(shared_data(), {4, 6});
  return {{"base", ModelParams::initialize(cfg, Variant::baseline, 1)},
          {"mask", ModelParams::initialize(cfg, Variant::masked, 1)}};
}

std::size_t lines(std::string const &s)
{
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("robustness sweep emits one row per model, level and seed")
{
  auto const models = two_models();
  for (auto kind : {NoiseKind::gaussian, NoiseKind::salt_pepper})
  {
    RobustnessOptions opt;
    opt.kind   = kind;
    opt.levels = kind == NoiseKind::gaussian ? kGaussianLevels : kSaltPepperLevels;
    auto const rows = robustness_sweep(models, shared_data(), opt);
    REQUIRE(rows.size() == 60);
    std::string const csv = robustness_csv(rows);
    CHECK(lines(csv) == 61);
    CHECK(csv.rfind("model,variant,noise_kind,level,seed,accuracy\n", 0) == 0);

    std::size_t i = 0;
    for (auto const &m : models)
    {
      double const clean = evaluate(m.params, shared_data(), Split::test).accuracy;
      for (double level : opt.levels)
      {
        for (auto seed : opt.seeds)
        {
          auto const &r = rows[i++];
          CHECK(r.model == m.name);
          CHECK(r.level == level);
          CHECK(r.seed == seed);
          CHECK(r.kind == kind);
          if (level == 0.0)
          {
            CHECK(r.accuracy == clean);
          }
        }
      }
    }
    CHECK(robustness_sweep(models, shared_data(), opt) == rows);
  }
}

TEST_CASE("noise seeds separate levels, seeds and images")
{
  CHECK(noise_seed(0, 5.0, 0) != noise_seed(0, 10.0, 0));
  CHECK(noise_seed(0, 5.0, 0) != noise_seed(1, 5.0, 0));
  CHECK(noise_seed(0, 5.0, 0) != noise_seed(0, 5.0, 1));
  CHECK(noise_seed(2, 5.0, 3) == noise_seed(2, 5.0, 3));
}

TEST_CASE("sensitivity sweep covers the grid and reuses the plain training path")
{
  SensitivityGrid grid;
  grid.learning_rates = {1e-3, 1e-2};
  grid.lambdas        = {0.0, 0.1};
  grid.seeds          = {0, 1};
  auto base           = tiny_train_config();
  base.max_epochs     = 2;

  auto const cells = sensitivity_sweep(grid, shared_data(), base, 1);
  REQUIRE(cells.size() == 8);
  std::vector<SensitivityRow> rows;
  for (auto const &c : cells)
  {
    rows.push_back(c.row);
  }
  CHECK(lines(sensitivity_csv(rows)) == 9);
  CHECK(sensitivity_csv(rows).rfind("lr,lambda,seed,test_accuracy\n", 0) == 0);

  auto cfg          = base;
  cfg.learning_rate = 1e-3;
  cfg.lambda        = 0.0;
  cfg.seed          = 1;
  auto const direct = train(cfg, shared_data());
  auto const it     = std::find_if(cells.begin(), cells.end(), [](SensitivityCell const &c) {
    return c.row.learning_rate == 1e-3 && c.row.lambda == 0.0 && c.row.seed == 1;
  });
  REQUIRE(it != cells.end());
  CHECK(bitwise_equal(it->result.params, direct.params));
  CHECK(it->row.test_accuracy == evaluate(direct.params, shared_data(), Split::test).accuracy);

  auto const parallel = sensitivity_sweep(grid, shared_data(), base, 3);
  for (std::size_t i = 0; i < cells.size(); ++i)
  {
    CHECK(parallel[i].row == cells[i].row);
    CHECK(bitwise_equal(parallel[i].result.params, cells[i].result.params));
  }
}

TEST_CASE("the standard sensitivity grid has 40 cells")
{
  SensitivityGrid const g;
  CHECK(g.learning_rates.size() * g.lambdas.size() * g.seeds.size() == 40);
}

TEST_CASE("parallel_for visits every index and rethrows failures")
{
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (auto const &h : hits)
  {
    CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 7)
                                 {
                                   throw std::runtime_error("boom");
                                 }
                               }),
                  std::runtime_error);
}
