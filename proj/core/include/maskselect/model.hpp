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

#include "maskselect/autodiff.hpp"
#include "maskselect/mask.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace maskselect {

enum class Variant
{
  baseline,
  masked,
};

std::string_view to_string(Variant v) noexcept;
/// Parses "baseline" / "masked"; throws ConfigError otherwise.
Variant parse_variant(std::string_view text);

/**
 * Shape of the convolutional encoder.
 *
 * Each block is a stride-2, padding-1 3x3 convolution followed by ReLU, so
 * every block halves the spatial grid.
 */
struct EncoderConfig
{
  std::size_t              channels{3};
  std::size_t              height{32};
  std::size_t              width{32};
  std::vector<std::size_t> block_channels{8, 16};
  std::size_t              n_classes{4};

  /// Throws ConfigError when the grid would not divide evenly or drop below 2x2.
  void validate() const;

  std::size_t feature_channels() const;
  std::size_t feature_rows() const;
  std::size_t feature_cols() const;

  bool operator==(EncoderConfig const &) const = default;
};

struct ConvBlockParams
{
  Tensor kernels;  // c_out x c_in x 3 x 3
  Tensor bias;     // c_out
};

/// All trainable state of one model. The mask exists only for the masked variant.
struct ModelParams
{
  EncoderConfig                config;
  std::vector<ConvBlockParams> blocks;
  std::optional<MaskParams>    mask;
  Tensor                       head_weights;  // n_classes x feature_channels
  Tensor                       head_bias;     // n_classes

  Variant variant() const noexcept
  {
    return mask ? Variant::masked : Variant::baseline;
  }

  /**
   * Seeded initialization: kernels and head weights uniform in
   * [-sqrt(1/fan_in), sqrt(1/fan_in)], biases zero, mask logits at
   * kInitialMaskLogit.
   */
  static ModelParams initialize(EncoderConfig const &config, Variant variant, std::uint64_t seed);

  /// Checks every tensor against `config`; throws ShapeError on mismatch.
  void validate() const;

  /// Stable parameter order shared by checkpoints, gradients and the optimizer.
  std::vector<std::string>    parameter_names() const;
  std::vector<Tensor *>       parameters();
  std::vector<Tensor const *> parameters() const;
};

bool bitwise_equal(ModelParams const &a, ModelParams const &b) noexcept;

/// Every node of one forward pass, for training and explanation.
struct ForwardGraph
{
  std::vector<Var>   parameters;  // same order as ModelParams::parameters()
  Var                image;
  Var                features;  // encoder output E
  std::optional<Var> mask;      // sigmoid(logits), masked variant only
  Var                selected;  // E with the mask applied (E itself for baseline)
  Var                pooled;
  Var                logits;
};

/// Records the full forward pass of `params` on `tape`.
ForwardGraph build_forward(Tape &tape, ModelParams const &params, Tensor const &image);

/// Encoder output E for an image of shape channels x height x width.
Tensor encode(ModelParams const &params, Tensor const &image);

/// f(gap(E)); ignores any mask the parameters carry.
Tensor predict_baseline(ModelParams const &params, Tensor const &image);

/// f(gap(E * M)); requires mask logits matching the feature grid.
Tensor predict_masked(ModelParams const &params, Tensor const &image);

/// Logits of whichever variant `params` is.
Tensor predict(ModelParams const &params, Tensor const &image);

/// Index of the largest logit, ties to the lowest index.
std::size_t argmax(Tensor const &logits);

}  // namespace maskselect
