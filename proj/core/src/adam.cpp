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

#include "maskselect/adam.hpp"

#include "maskselect/errors.hpp"

#include <cmath>

namespace maskselect {

AdamState AdamState::zeros_like(std::span<Tensor const *const> params)
{
  AdamState s;
  for (auto const *p : params)
  {
    s.first_moment.emplace_back(p->shape());
    s.second_moment.emplace_back(p->shape());
  }
  return s;
}

void adam_step(std::span<Tensor *const> params, std::span<Tensor const> grads, AdamState &state,
               double learning_rate)
{
  if (grads.size() != params.size() || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size())
  {
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    if (grads[i].shape() != params[i]->shape() ||
        state.first_moment[i].shape() != params[i]->shape() ||
        state.second_moment[i].shape() != params[i]->shape())
    {
      throw ShapeError("adam_step: shape mismatch on parameter " + std::to_string(i));
    }
  }

  ++state.step;
  auto const   t           = static_cast<double>(state.step);
  double const correction1 = 1.0 - std::pow(AdamState::kBeta1, t);
  double const correction2 = 1.0 - std::pow(AdamState::kBeta2, t);

  for (std::size_t i = 0; i < params.size(); ++i)
  {
    auto theta = params[i]->data();
    auto g     = grads[i].data();
    auto m     = state.first_moment[i].data();
    auto v     = state.second_moment[i].data();
    for (std::size_t j = 0; j < theta.size(); ++j)
    {
      m[j]              = AdamState::kBeta1 * m[j] + (1.0 - AdamState::kBeta1) * g[j];
      v[j]              = AdamState::kBeta2 * v[j] + (1.0 - AdamState::kBeta2) * g[j] * g[j];
      double const mhat = m[j] / correction1;
      double const vhat = v[j] / correction2;
      theta[j] -= learning_rate * mhat / (std::sqrt(vhat) + AdamState::kEpsilon);
    }
  }
}

}  // namespace maskselect
