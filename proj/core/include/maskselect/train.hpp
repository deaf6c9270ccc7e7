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

#include "maskselect/mask.hpp"
#include "maskselect/model.hpp"
#include "maskselect/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

namespace maskselect {

struct TrainConfig
{
  double                   learning_rate{1e-3};
  double                   lambda{0.1};
  std::size_t              batch_size{16};
  std::size_t              max_epochs{200};
  std::size_t              patience{10};
  std::uint64_t            seed{0};
  Variant                  variant{Variant::masked};
  std::vector<std::size_t> block_channels{8, 16};

  void validate() const;
};

struct EpochStats
{
  std::size_t epoch{0};  // 1-based
  double      train_loss{0.0};
  double      val_loss{0.0};
  double      val_accuracy{0.0};

  bool operator==(EpochStats const &) const = default;
};

struct TrainRecord
{
  std::vector<EpochStats> epochs;
  std::size_t             stopping_epoch{0};
  std::size_t             best_epoch{0};
  bool                    stopped_early{false};
  double                  wall_seconds{0.0};

  /// "epoch,train_loss,val_loss,val_acc" with shortest round-trip decimals.
  std::string to_csv() const;
  void        write_csv(std::filesystem::path const &path) const;
};

struct TrainResult
{
  ModelParams params;
  TrainRecord record;
};

/// Loss breakdown and parameter gradients for one example.
struct SampleGradient
{
  MaskedLossBreakdown loss;
  std::vector<Tensor> grads;  // ModelParams::parameters() order
};

/**
 * Gradient of cross-entropy (plus lambda * L1 of the mask for the masked
 * variant) for one labeled image.
 */
SampleGradient compute_gradient(ModelParams const &params, Tensor const &image, std::size_t label,
                                double lambda);

/**
 * Seeded mini-batch Adam on the train split with early stopping on the mean
 * validation cross-entropy. Returns the parameters of the best validation
 * epoch. Single-threaded and bitwise reproducible for a fixed seed.
 */
TrainResult train(TrainConfig const &config, LoadedDataset const &data);

struct EvalResult
{
  double                                accuracy{0.0};
  std::size_t                           correct{0};
  std::size_t                           total{0};
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

/// Accuracy and confusion counts of predicted vs true labels.
EvalResult score_predictions(std::vector<std::size_t> const &predicted,
                             std::vector<std::size_t> const &labels, std::size_t n_classes);

/// Argmax accuracy on one split; ties go to the lowest class index.
EvalResult evaluate(ModelParams const &params, LoadedDataset const &data, Split split);

/// Same, over an explicit list of images.
EvalResult evaluate(ModelParams const &params, std::vector<Tensor> const &images,
                    std::vector<std::size_t> const &labels);

/// Mean cross-entropy over a split.
double mean_prediction_loss(ModelParams const &params, LoadedDataset const &data, Split split);

/// Encoder configuration matching the images and classes of `data`.
EncoderConfig encoder_config_for(LoadedDataset const &data, std::vector<std::size_t> block_channels);

}  // namespace maskselect
