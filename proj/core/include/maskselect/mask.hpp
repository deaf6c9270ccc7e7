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

namespace maskselect {

/// Logit whose sigmoid is 0.9: fresh masks start close to "keep everything".
inline constexpr double kInitialMaskLogit = 2.1972245773362196;

/// Mask entries below this value are reported as suppressed. Reporting only.
inline constexpr double kSuppressedThreshold = 0.05;

/**
 * Unconstrained logits of the spatial selection mask.
 *
 * The mask itself is sigmoid(logits), so every entry lies strictly inside
 * (0, 1) for finite logits. The grid has the same rows x cols layout as the
 * encoder's feature map and one value is shared by all channels.
 */
struct MaskParams
{
  Tensor logits;

  static MaskParams initial(std::size_t rows, std::size_t cols);
};

/// The four scalars of the masked objective, as plain numbers.
struct MaskedLossBreakdown
{
  double prediction_loss{0.0};
  double regularization_loss{0.0};
  double lambda{0.0};
  double total{0.0};
};

/// Breakdown plus the tape node of the total, ready for backward().
struct MaskedLoss
{
  MaskedLossBreakdown breakdown;
  Var                 total;
};

/// sigmoid(logits); differentiable.
Var mask_from_logits(Var logits);

/// Plain-value variant for reporting.
Tensor mask_values(MaskParams const &params);

/**
 * Hadamard product of a c x rows x cols feature map with a rows x cols mask
 * broadcast over channels. The mask adjoint is summed over channels.
 */
Var apply_mask(Var features, Var mask);

/// Sum of |m_i| over every mask entry.
Var l1_importance(Var mask);

/**
 * prediction_loss + lambda * l1_importance(mask).
 *
 * With lambda == 0 the regularizer is left out of the graph, so the total is
 * the prediction loss node itself.
 */
MaskedLoss total_loss(Var prediction_loss, Var mask, double lambda);

}  // namespace maskselect
