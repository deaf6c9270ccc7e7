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

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace maskselect {

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var
{
public:
  Var() = default;

  Tensor const &value() const;
  Tensor const &grad() const;
  Tape         &tape() const;
  std::size_t   index() const noexcept
  {
    return index_;
  }
  bool valid() const noexcept
  {
    return tape_ != nullptr;
  }

private:
  friend class Tape;
  Var(Tape *tape, std::size_t index)
    : tape_(tape)
    , index_(index)
  {}

  Tape       *tape_{nullptr};
  std::size_t index_{0};
};

/// What a node's adjoint sees during the reverse sweep.
struct BackwardArgs
{
  std::span<Tensor const *const> inputs;
  Tensor const                  &output;
  Tensor const                  &grad_output;
  /// Accumulators for the inputs' gradients; adjoints must add, never assign.
  /// Null for inputs that do not require a gradient.
  std::span<Tensor *const> grad_inputs;
};

using BackwardFn = std::function<void(BackwardArgs const &)>;

/**
 * Define-by-run reverse-mode tape.
 *
 * Nodes are appended in evaluation order, so the node list is already a
 * topological order. A tape is rebuilt for every forward pass and must not be
 * shared between threads.
 */
class Tape
{
public:
  Tape() = default;
  Tape(Tape const &)            = delete;
  Tape &operator=(Tape const &) = delete;

  /// Registers a value with no inputs (parameter or data).
  Var leaf(Tensor value);

  /// A leaf that never needs a gradient; its grad stays zero and adjoints skip it.
  Var constant(Tensor value);

  /// Registers the result of a primitive. `inputs` must live on this tape.
  Var record(Tensor value, std::vector<Var> const &inputs, BackwardFn backward);

  /**
   * Reverse sweep from a scalar loss. Clears every gradient first, so calling
   * it twice yields identical results. Nodes that do not feed the loss end up
   * with zero gradients, as do constants and everything computed only from
   * constants.
   */
  void backward(Var loss);

  Tensor const &value(std::size_t index) const;
  Tensor const &grad(std::size_t index) const;
  std::size_t   size() const noexcept
  {
    return nodes_.size();
  }

private:
  struct Node
  {
    Tensor                   value;
    Tensor                   grad;
    std::vector<std::size_t> inputs;
    BackwardFn               backward;
    bool                     requires_grad{true};
  };

  Var push(Tensor value, std::vector<Var> const &inputs, BackwardFn backward, bool requires_grad);

  // Deque keeps value and grad references stable while nodes are appended.
  std::deque<Node> nodes_;
};

/// Tensor-level primitives. Each records itself with its adjoint.
namespace ops {

/// 3x3 cross-correlation: input c_in x h x w, kernels c_out x c_in x 3 x 3, bias c_out.
Var conv2d(Var input, Var kernels, Var bias, std::size_t stride, std::size_t padding);
Var relu(Var x);
/// Global average pooling: c x d x k -> c.
Var gap(Var x);
Var sigmoid(Var x);
/// weights (n x c) . input (c) + bias (n).
Var linear(Var input, Var weights, Var bias);
/// -log softmax(logits)[label], computed with max subtraction.
Var softmax_cross_entropy(Var logits, std::size_t label);

Var add(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var x, double factor);
Var sum(Var x);
/// Sum of absolute values, adjoint sign(x) with sign(0) = 0.
Var abs_sum(Var x);

}  // namespace ops

/// Output spatial extent of a 3x3 convolution; zero when the window does not fit.
std::size_t conv_output_extent(std::size_t extent, std::size_t stride, std::size_t padding);

/// Numerically stable softmax of a rank-1 tensor.
Tensor softmax(Tensor const &logits);

}  // namespace maskselect
