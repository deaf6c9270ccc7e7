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

#include "maskselect/model.hpp"
#include "maskselect/noise.hpp"
#include "maskselect/scene.hpp"
#include "maskselect/train.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maskselect {

/// Noise levels used for each corruption family.
inline std::vector<double> const kGaussianLevels{0, 5, 10, 15, 20, 25};
inline std::vector<double> const kSaltPepperLevels{0, 0.001, 0.002, 0.003, 0.004, 0.005};
inline std::vector<std::uint64_t> const kDefaultSeeds{0, 1, 2, 3, 4};

struct NamedModel
{
  std::string name;
  ModelParams params;
};

struct RobustnessRow
{
  std::string   model;
  Variant       variant{Variant::masked};
  NoiseKind     kind{NoiseKind::gaussian};
  double        level{0.0};
  std::uint64_t seed{0};
  double        accuracy{0.0};

  bool operator==(RobustnessRow const &) const = default;
};

struct RobustnessOptions
{
  NoiseKind                  kind{NoiseKind::gaussian};
  std::vector<double>        levels{kGaussianLevels};
  std::vector<std::uint64_t> seeds{kDefaultSeeds};
  bool                       level_is_stddev{false};
};

/**
 * Corrupts every test image at each (level, seed) and evaluates every model on
 * the same corrupted copies. Rows are ordered by model (input order), level
 * (input order), then seed.
 */
std::vector<RobustnessRow> robustness_sweep(std::vector<NamedModel> const &models,
                                            LoadedDataset const           &data,
                                            RobustnessOptions const       &options);

/// Seed for corrupting test image `image_index` at `level` in run `seed`.
std::uint64_t noise_seed(std::uint64_t seed, double level, std::size_t image_index) noexcept;

/// Header "model,variant,noise_kind,level,seed,accuracy".
std::string robustness_csv(std::vector<RobustnessRow> const &rows);

struct SensitivityRow
{
  double        learning_rate{0.0};
  double        lambda{0.0};
  std::uint64_t seed{0};
  double        test_accuracy{0.0};

  bool operator==(SensitivityRow const &) const = default;
};

struct SensitivityCell
{
  SensitivityRow row;
  TrainResult    result;
};

struct SensitivityGrid
{
  std::vector<double>        learning_rates{1e-4, 1e-3};
  std::vector<double>        lambdas{0.0, 0.01, 0.1, 1.0};
  std::vector<std::uint64_t> seeds{kDefaultSeeds};
};

/**
 * Trains one masked model per (lr, lambda, seed) starting from `base` and
 * records its test accuracy. `workers` > 1 runs cells on separate threads;
 * the output order (lr, lambda, seed) does not depend on scheduling.
 */
std::vector<SensitivityCell> sensitivity_sweep(SensitivityGrid const &grid, LoadedDataset const &data,
                                               TrainConfig const &base, std::size_t workers = 1);

/// Header "lr,lambda,seed,test_accuracy".
std::string sensitivity_csv(std::vector<SensitivityRow> const &rows);

/// Runs fn(0..n-1) on up to `workers` threads; each index runs exactly once.
void parallel_for(std::size_t n, std::size_t workers, std::function<void(std::size_t)> const &fn);

}  // namespace maskselect
