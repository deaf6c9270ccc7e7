#pragma once

#include "maskselect/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace maskselect::testing {

/// Builds a scalar loss from leaves holding the given inputs.
using LossBuilder = std::function<Var(Tape &, std::vector<Var> const &)>;

struct GradientCheck
{
  double      max_rel_error{0.0};
  std::size_t entries{0};
};

inline double evaluate_loss(LossBuilder const &build, std::vector<Tensor> const &inputs)
{
  Tape             tape;
  std::vector<Var> vars;
  for (auto const &t : inputs)
  {
    vars.push_back(tape.leaf(t));
  }
  return build(tape, vars).value().item();
}

/// Compares reverse-mode gradients against central differences on every input entry.
inline GradientCheck check_gradients(LossBuilder const &build, std::vector<Tensor> inputs,
                                     double step = 1e-5)
{
  std::vector<Tensor> analytic;
  {
    Tape             tape;
    std::vector<Var> vars;
    for (auto const &t : inputs)
    {
      vars.push_back(tape.leaf(t));
    }
    Var loss = build(tape, vars);
    tape.backward(loss);
    for (auto const &v : vars)
    {
      analytic.push_back(v.grad());
    }
  }

  GradientCheck out;
  for (std::size_t k = 0; k < inputs.size(); ++k)
  {
    for (std::size_t i = 0; i < inputs[k].size(); ++i)
    {
      double const saved = inputs[k][i];
      inputs[k][i]       = saved + step;
      double const up    = evaluate_loss(build, inputs);
      inputs[k][i]       = saved - step;
      double const down  = evaluate_loss(build, inputs);
      inputs[k][i]       = saved;

      double const numeric = (up - down) / (2.0 * step);
      double const a       = analytic[k][i];
      double const denom   = std::max({std::abs(a), std::abs(numeric), 1e-8});
      out.max_rel_error    = std::max(out.max_rel_error, std::abs(a - numeric) / denom);
      ++out.entries;
    }
  }
  return out;
}

}  // namespace maskselect::testing
