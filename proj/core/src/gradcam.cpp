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

#include "maskselect/gradcam.hpp"

#include "maskselect/errors.hpp"

#include <algorithm>

namespace maskselect {

Heatmap grad_cam(ModelParams const &params, Tensor const &image, std::size_t target_class)
{
  if (target_class >= params.config.n_classes)
  {
    throw InputError("target class " + std::to_string(target_class) + " out of range for " +
                     std::to_string(params.config.n_classes) + " classes");
  }

  Tape       tape;
  auto const graph = build_forward(tape, params, image);
  Tensor     onehot({params.config.n_classes});
  onehot[target_class] = 1.0;
  Var const score      = ops::sum(ops::mul(graph.logits, tape.constant(onehot)));
  tape.backward(score);

  Tensor const     &fmap     = graph.selected.value();
  Tensor const     &grad     = graph.selected.grad();
  std::size_t const channels = fmap.dim(0);
  std::size_t const rows     = fmap.dim(1);
  std::size_t const cols     = fmap.dim(2);
  std::size_t const area     = rows * cols;

  Tensor grid({rows, cols});
  for (std::size_t c = 0; c < channels; ++c)
  {
    double alpha = 0.0;
    for (std::size_t i = 0; i < area; ++i)
    {
      alpha += grad[c * area + i];
    }
    alpha /= static_cast<double>(area);
    for (std::size_t i = 0; i < area; ++i)
    {
      grid[i] += alpha * fmap[c * area + i];
    }
  }
  double peak = 0.0;
  for (auto &v : grid.data())
  {
    v    = std::max(v, 0.0);
    peak = std::max(peak, v);
  }
  if (peak > 0.0)
  {
    for (auto &v : grid.data())
    {
      v /= peak;
    }
  }

  Heatmap out;
  out.target_class = target_class;
  out.confidence   = softmax(graph.logits.value())[target_class];
  Tensor const big = upsample_nearest(grid, params.config.height, params.config.width);
  out.upsampled    = Image8(params.config.width, params.config.height, 1);
  for (std::size_t i = 0; i < big.size(); ++i)
  {
    out.upsampled.pixels[i] = quantize_unit(big[i]);
  }
  out.grid = std::move(grid);
  return out;
}

Tensor upsample_nearest(Tensor const &grid, std::size_t height, std::size_t width)
{
  if (grid.rank() != 2)
  {
    throw ShapeError("upsample_nearest expects a rank-2 grid");
  }
  std::size_t const rows = grid.dim(0);
  std::size_t const cols = grid.dim(1);
  Tensor            out({height, width});
  for (std::size_t r = 0; r < height; ++r)
  {
    for (std::size_t c = 0; c < width; ++c)
    {
      out.at(r, c) = grid.at(r * rows / height, c * cols / width);
    }
  }
  return out;
}

CueConcentration cue_concentration(Tensor const &map, CueBox const &cue)
{
  if (map.rank() != 2 || cue.size == 0 || cue.row + cue.size > map.dim(0) ||
      cue.col + cue.size > map.dim(1))
  {
    throw InputError("cue box lies outside the heatmap");
  }
  std::size_t const h = map.dim(0);
  std::size_t const w = map.dim(1);
  std::size_t const q = cue.size;

  // Summed-area table for O(1) window sums.
  std::vector<double> sat((h + 1) * (w + 1), 0.0);
  for (std::size_t r = 0; r < h; ++r)
  {
    for (std::size_t c = 0; c < w; ++c)
    {
      sat[(r + 1) * (w + 1) + c + 1] = map.at(r, c) + sat[r * (w + 1) + c + 1] +
                                       sat[(r + 1) * (w + 1) + c] - sat[r * (w + 1) + c];
    }
  }
  auto window = [&](std::size_t r, std::size_t c) {
    return sat[(r + q) * (w + 1) + c + q] - sat[r * (w + 1) + c + q] - sat[(r + q) * (w + 1) + c] +
           sat[r * (w + 1) + c];
  };

  CueConcentration out;
  out.cue_mass      = window(cue.row, cue.col);
  double      total = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r + q <= h; ++r)
  {
    for (std::size_t c = 0; c + q <= w; ++c)
    {
      bool const touches = r < cue.row + q && cue.row < r + q && c < cue.col + q && cue.col < c + q;
      if (!touches)
      {
        total += window(r, c);
        ++count;
      }
    }
  }
  out.background_mass = count == 0 ? 0.0 : total / static_cast<double>(count);
  return out;
}

}  // namespace maskselect
