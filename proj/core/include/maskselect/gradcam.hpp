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

#include "maskselect/image.hpp"
#include "maskselect/model.hpp"
#include "maskselect/scene.hpp"

namespace maskselect {

/**
 * Class activation map over the feature grid.
 *
 * `grid` is nonnegative and, unless identically zero, has maximum 1.
 * `upsampled` is the nearest-neighbor enlargement of `grid` to the input
 * resolution, quantized to 0-255 (single channel).
 */
struct Heatmap
{
  Tensor      grid;
  Image8      upsampled;
  std::size_t target_class{0};
  double      confidence{0.0};
};

/**
 * Gradient-weighted class activation map for `target_class`.
 *
 * Taps the pooled-over feature map: the masked map for the masked variant,
 * the raw encoder output for the baseline. Channel weights are the spatial
 * mean of d logit[target] / d features.
 */
Heatmap grad_cam(ModelParams const &params, Tensor const &image, std::size_t target_class);

/// Nearest-neighbor enlargement of a rows x cols grid to height x width.
Tensor upsample_nearest(Tensor const &grid, std::size_t height, std::size_t width);

struct CueConcentration
{
  double cue_mass{0.0};
  /// Mean mass over every cue-sized window that does not touch the cue.
  double background_mass{0.0};
};

/// Compares heatmap mass inside the cue box against equal-area background windows.
CueConcentration cue_concentration(Tensor const &upsampled_grid, CueBox const &cue);

}  // namespace maskselect
