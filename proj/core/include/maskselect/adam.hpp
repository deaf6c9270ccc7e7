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

#include "maskselect/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace maskselect {

/// First/second moment accumulators, one pair per parameter tensor.
struct AdamState
{
  static constexpr double kBeta1   = 0.9;
  static constexpr double kBeta2   = 0.999;
  static constexpr double kEpsilon = 1e-8;

  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;
  std::uint64_t       step{0};

  /// Zeroed state shaped like `params`, t = 0.
  static AdamState zeros_like(std::span<Tensor const *const> params);
};

/**
 * One bias-corrected Adam update:
 *   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
 *   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
 * Throws ShapeError if grads or state do not mirror params.
 */
void adam_step(std::span<Tensor *const> params, std::span<Tensor const> grads, AdamState &state,
               double learning_rate);

}  // namespace maskselect
