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

#include "maskselect/sweep.hpp"

#include "maskselect/errors.hpp"
#include "maskselect/format.hpp"
#include "maskselect/rng.hpp"

#include <atomic>
#include <bit>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace maskselect {

std::uint64_t noise_seed(std::uint64_t seed, double level, std::size_t image_index) noexcept
{
  return derive_seed(derive_seed(seed, std::bit_cast<std::uint64_t>(level)), image_index);
}

std::vector<RobustnessRow> robustness_sweep(std::vector<NamedModel> const &models,
                                            LoadedDataset const           &data,
                                            RobustnessOptions const       &options)
{
  auto const test = data.split(Split::test);
  if (test.empty())
  {
    throw ConfigError("robustness sweep needs a nonempty test split");
  }
  for (auto level : options.levels)
  {
    NoiseSpec{options.kind, level, 0}.validate();
  }
  for (auto const &m : models)
  {
    if (m.params.config.n_classes < data.n_classes)
    {
      throw ConfigError("model '" + m.name + "' has fewer classes than the dataset");
    }
  }

  std::vector<std::size_t> labels;
  for (auto const *s : test)
  {
    labels.push_back(s->label);
  }

  std::size_t const n_levels = options.levels.size();
  std::size_t const n_seeds  = options.seeds.size();
  std::vector<RobustnessRow> rows(models.size() * n_levels * n_seeds);

  for (std::size_t li = 0; li < n_levels; ++li)
  {
    double const level = options.levels[li];
    for (std::size_t si = 0; si < n_seeds; ++si)
    {
      std::uint64_t const seed = options.seeds[si];
      std::vector<Tensor> noisy;
      noisy.reserve(test.size());
      for (std::size_t i = 0; i < test.size(); ++i)
      {
        NoiseSpec const spec{options.kind, level, noise_seed(seed, level, i)};
        noisy.push_back(to_tensor(apply_noise(test[i]->pixels, spec, options.level_is_stddev)));
      }
      for (std::size_t mi = 0; mi < models.size(); ++mi)
      {
        auto const &m = models[mi];
        rows[(mi * n_levels + li) * n_seeds + si] =
            RobustnessRow{m.name,  m.params.variant(),
                          options.kind, level,
                          seed,    evaluate(m.params, noisy, labels).accuracy};
      }
    }
  }
  return rows;
}

std::string robustness_csv(std::vector<RobustnessRow> const &rows)
{
  std::ostringstream out;
  out << "model,variant,noise_kind,level,seed,accuracy\n";
  for (auto const &r : rows)
  {
    out << r.model << ',' << to_string(r.variant) << ',' << to_string(r.kind) << ','
        << format_number(r.level) << ',' << r.seed << ',' << format_number(r.accuracy) << '\n';
  }
  return out.str();
}

void parallel_for(std::size_t n, std::size_t workers, std::function<void(std::size_t)> const &fn)
{
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr       failure;
  std::mutex               failure_lock;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
  {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++)
      {
        try
        {
          fn(i);
        }
        catch (...)
        {
          std::lock_guard lock(failure_lock);
          if (!failure)
          {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  if (failure)
  {
    std::rethrow_exception(failure);
  }
}

std::vector<SensitivityCell> sensitivity_sweep(SensitivityGrid const &grid, LoadedDataset const &data,
                                               TrainConfig const &base, std::size_t workers)
{
  if (grid.learning_rates.empty() || grid.lambdas.empty() || grid.seeds.empty())
  {
    throw ConfigError("sensitivity grid must be nonempty in every axis");
  }
  std::size_t const n_lambda = grid.lambdas.size();
  std::size_t const n_seed   = grid.seeds.size();
  std::size_t const n        = grid.learning_rates.size() * n_lambda * n_seed;

  std::vector<SensitivityCell> cells(n);
  parallel_for(n, workers, [&](std::size_t i) {
    TrainConfig cfg   = base;
    cfg.variant       = Variant::masked;
    cfg.learning_rate = grid.learning_rates[i / (n_lambda * n_seed)];
    cfg.lambda        = grid.lambdas[(i / n_seed) % n_lambda];
    cfg.seed          = grid.seeds[i % n_seed];
    TrainResult result = train(cfg, data);
    double const acc   = evaluate(result.params, data, Split::test).accuracy;
    cells[i]           = SensitivityCell{{cfg.learning_rate, cfg.lambda, cfg.seed, acc}, std::move(result)};
  });
  return cells;
}

std::string sensitivity_csv(std::vector<SensitivityRow> const &rows)
{
  std::ostringstream out;
  out << "lr,lambda,seed,test_accuracy\n";
  for (auto const &r : rows)
  {
    out << format_number(r.learning_rate) << ',' << format_number(r.lambda) << ',' << r.seed << ','
        << format_number(r.test_accuracy) << '\n';
  }
  return out.str();
}

}  // namespace maskselect
