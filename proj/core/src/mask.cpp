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

#include "maskselect/mask.hpp"

#include "maskselect/errors.hpp"

#include <cmath>

namespace maskselect {

MaskParams MaskParams::initial(std::size_t rows, std::size_t cols)
{
  return MaskParams{Tensor({rows, cols}, kInitialMaskLogit)};
}

Var mask_from_logits(Var logits)
{
  return ops::sigmoid(logits);
}

Tensor mask_values(MaskParams const &params)
{
  Tape tape;
  return mask_from_logits(tape.leaf(params.logits)).value();
}

Var apply_mask(Var features, Var mask)
{
  Tensor const &e = features.value();
  Tensor const &m = mask.value();
  if (e.rank() != 3 || m.rank() != 2 || e.dim(1) != m.dim(0) || e.dim(2) != m.dim(1))
  {
    throw ShapeError("apply_mask: mask " + shape_to_string(m.shape()) +
                     " does not match the spatial grid of features " + shape_to_string(e.shape()));
  }
  if (&features.tape() != &mask.tape())
  {
    throw UsageError("apply_mask: operands live on different tapes");
  }
  std::size_t const channels = e.dim(0);
  std::size_t const area     = m.size();

  Tensor out = e;
  for (std::size_t ch = 0; ch < channels; ++ch)
  {
    for (std::size_t i = 0; i < area; ++i)
    {
      out[ch * area + i] *= m[i];
    }
  }

  return features.tape().record(
      std::move(out), {features, mask}, [channels, area](BackwardArgs const &a) {
        auto const ev = a.inputs[0]->data();
        auto const mv = a.inputs[1]->data();
        auto const g  = a.grad_output.data();
        Tensor    *ge = a.grad_inputs[0];
        Tensor    *gm = a.grad_inputs[1];
        for (std::size_t ch = 0; ch < channels; ++ch)
        {
          for (std::size_t i = 0; i < area; ++i)
          {
            std::size_t const idx = ch * area + i;
            if (ge != nullptr)
            {
              (*ge)[idx] += g[idx] * mv[i];
            }
            if (gm != nullptr)
            {
              (*gm)[i] += g[idx] * ev[idx];
            }
          }
        }
      });
}

Var l1_importance(Var mask)
{
  return ops::abs_sum(mask);
}

MaskedLoss total_loss(Var prediction_loss, Var mask, double lambda)
{
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
  {
    throw ConfigError("lambda must be a finite nonnegative number, got " + std::to_string(lambda));
  }
  if (!prediction_loss.value().is_scalar())
  {
    throw ShapeError("prediction loss must be a scalar");
  }

  MaskedLoss result;
  result.breakdown.lambda          = lambda;
  result.breakdown.prediction_loss = prediction_loss.value().item();

  if (lambda == 0.0)
  {
    // Still report the regularizer value; it just does not enter the objective.
    double reg = 0.0;
    for (auto v : mask.value().data())
    {
      reg += std::abs(v);
    }
    result.breakdown.regularization_loss = reg;
    result.breakdown.total               = result.breakdown.prediction_loss;
    result.total                         = prediction_loss;
    return result;
  }

  Var reg                              = l1_importance(mask);
  result.total                         = ops::add(prediction_loss, ops::scale(reg, lambda));
  result.breakdown.regularization_loss = reg.value().item();
  result.breakdown.total               = result.total.value().item();
  return result;
}

}  // namespace maskselect
