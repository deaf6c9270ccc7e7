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

#include "maskselect/model.hpp"

#include "maskselect/errors.hpp"
#include "maskselect/rng.hpp"

#include <cmath>

namespace maskselect {

std::string_view to_string(Variant v) noexcept
{
  return v == Variant::masked ? "masked" : "baseline";
}

Variant parse_variant(std::string_view text)
{
  if (text == "masked")
  {
    return Variant::masked;
  }
  if (text == "baseline")
  {
    return Variant::baseline;
  }
  throw ConfigError("unknown model variant '" + std::string(text) + "'");
}

void EncoderConfig::validate() const
{
  if (channels == 0 || height == 0 || width == 0)
  {
    throw ConfigError("encoder input size must be positive");
  }
  if (block_channels.empty())
  {
    throw ConfigError("encoder needs at least one conv block");
  }
  for (auto c : block_channels)
  {
    if (c == 0)
    {
      throw ConfigError("conv block channel counts must be positive");
    }
  }
  if (n_classes == 0)
  {
    throw ConfigError("n_classes must be positive");
  }
  std::size_t const factor = std::size_t{1} << block_channels.size();
  if (height % factor != 0 || width % factor != 0)
  {
    throw ConfigError("input " + std::to_string(height) + "x" + std::to_string(width) +
                      " is not divisible by 2^" + std::to_string(block_channels.size()));
  }
  if (height / factor < 2 || width / factor < 2)
  {
    throw ConfigError("feature grid would be smaller than 2x2");
  }
}

std::size_t EncoderConfig::feature_channels() const
{
  return block_channels.back();
}

std::size_t EncoderConfig::feature_rows() const
{
  return height >> block_channels.size();
}

std::size_t EncoderConfig::feature_cols() const
{
  return width >> block_channels.size();
}

ModelParams ModelParams::initialize(EncoderConfig const &config, Variant variant,
                                    std::uint64_t seed)
{
  config.validate();
  SplitMix64 rng(seed);

  auto draw = [&rng](Tensor &t, std::size_t fan_in) {
    double const s = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (auto &v : t.data())
    {
      v = rng.uniform(-s, s);
    }
  };

  ModelParams p;
  p.config        = config;
  std::size_t c_in = config.channels;
  for (auto c_out : config.block_channels)
  {
    ConvBlockParams block{Tensor({c_out, c_in, 3, 3}), Tensor({c_out})};
    draw(block.kernels, c_in * 9);
    p.blocks.push_back(std::move(block));
    c_in = c_out;
  }
  if (variant == Variant::masked)
  {
    p.mask = MaskParams::initial(config.feature_rows(), config.feature_cols());
  }
  p.head_weights = Tensor({config.n_classes, c_in});
  draw(p.head_weights, c_in);
  p.head_bias = Tensor({config.n_classes});
  return p;
}

void ModelParams::validate() const
{
  config.validate();
  auto expect = [](Tensor const &t, Shape const &shape, std::string const &name) {
    if (t.shape() != shape)
    {
      throw ShapeError(name + " has shape " + shape_to_string(t.shape()) + ", expected " +
                       shape_to_string(shape));
    }
  };
  if (blocks.size() != config.block_channels.size())
  {
    throw ShapeError("model has " + std::to_string(blocks.size()) + " conv blocks, config expects " +
                     std::to_string(config.block_channels.size()));
  }
  std::size_t c_in = config.channels;
  for (std::size_t i = 0; i < blocks.size(); ++i)
  {
    std::size_t const c_out = config.block_channels[i];
    expect(blocks[i].kernels, {c_out, c_in, 3, 3}, "encoder." + std::to_string(i) + ".kernels");
    expect(blocks[i].bias, {c_out}, "encoder." + std::to_string(i) + ".bias");
    c_in = c_out;
  }
  if (mask)
  {
    expect(mask->logits, {config.feature_rows(), config.feature_cols()}, "mask.logits");
  }
  expect(head_weights, {config.n_classes, c_in}, "head.weights");
  expect(head_bias, {config.n_classes}, "head.bias");
}

std::vector<std::string> ModelParams::parameter_names() const
{
  std::vector<std::string> names;
  for (std::size_t i = 0; i < blocks.size(); ++i)
  {
    names.push_back("encoder." + std::to_string(i) + ".kernels");
    names.push_back("encoder." + std::to_string(i) + ".bias");
  }
  if (mask)
  {
    names.emplace_back("mask.logits");
  }
  names.emplace_back("head.weights");
  names.emplace_back("head.bias");
  return names;
}

std::vector<Tensor *> ModelParams::parameters()
{
  std::vector<Tensor *> out;
  for (auto &b : blocks)
  {
    out.push_back(&b.kernels);
    out.push_back(&b.bias);
  }
  if (mask)
  {
    out.push_back(&mask->logits);
  }
  out.push_back(&head_weights);
  out.push_back(&head_bias);
  return out;
}

std::vector<Tensor const *> ModelParams::parameters() const
{
  auto                        mutable_view = const_cast<ModelParams *>(this)->parameters();
  std::vector<Tensor const *> out(mutable_view.begin(), mutable_view.end());
  return out;
}

bool bitwise_equal(ModelParams const &a, ModelParams const &b) noexcept
{
  if (!(a.config == b.config) || a.variant() != b.variant())
  {
    return false;
  }
  auto const pa = a.parameters();
  auto const pb = b.parameters();
  if (pa.size() != pb.size())
  {
    return false;
  }
  for (std::size_t i = 0; i < pa.size(); ++i)
  {
    if (!bitwise_equal(*pa[i], *pb[i]))
    {
      return false;
    }
  }
  return true;
}

namespace {

void check_image(EncoderConfig const &config, Tensor const &image)
{
  Shape const expected{config.channels, config.height, config.width};
  if (image.shape() != expected)
  {
    throw ConfigError("image shape " + shape_to_string(image.shape()) +
                      " does not match encoder input " + shape_to_string(expected));
  }
}

}  // namespace

ForwardGraph build_forward(Tape &tape, ModelParams const &params, Tensor const &image)
{
  check_image(params.config, image);

  ForwardGraph g;
  for (auto const *t : params.parameters())
  {
    g.parameters.push_back(tape.leaf(*t));
  }
  g.image = tape.constant(image);

  Var         x = g.image;
  std::size_t p = 0;
  for (std::size_t i = 0; i < params.blocks.size(); ++i, p += 2)
  {
    x = ops::relu(ops::conv2d(x, g.parameters[p], g.parameters[p + 1], 2, 1));
  }
  g.features = x;
  g.selected = x;
  if (params.mask)
  {
    g.mask     = mask_from_logits(g.parameters[p++]);
    g.selected = apply_mask(g.features, *g.mask);
  }
  g.pooled = ops::gap(g.selected);
  g.logits = ops::linear(g.pooled, g.parameters[p], g.parameters[p + 1]);
  return g;
}

Tensor encode(ModelParams const &params, Tensor const &image)
{
  check_image(params.config, image);
  if (params.blocks.empty())
  {
    throw ConfigError("model has no conv blocks");
  }
  Tape tape;
  Var  x = tape.constant(image);
  for (auto const &b : params.blocks)
  {
    x = ops::relu(ops::conv2d(x, tape.leaf(b.kernels), tape.leaf(b.bias), 2, 1));
  }
  return x.value();
}

namespace {

Tensor head(ModelParams const &params, Tape &tape, Var selected)
{
  return ops::linear(ops::gap(selected), tape.leaf(params.head_weights), tape.leaf(params.head_bias))
      .value();
}

}  // namespace

Tensor predict_baseline(ModelParams const &params, Tensor const &image)
{
  Tape tape;
  Var  e = tape.leaf(encode(params, image));
  return head(params, tape, e);
}

Tensor predict_masked(ModelParams const &params, Tensor const &image)
{
  if (!params.mask)
  {
    throw ShapeError("predict_masked: model has no mask");
  }
  Tape tape;
  Var  e = tape.leaf(encode(params, image));
  Var  m = mask_from_logits(tape.leaf(params.mask->logits));
  return head(params, tape, apply_mask(e, m));
}

Tensor predict(ModelParams const &params, Tensor const &image)
{
  return params.mask ? predict_masked(params, image) : predict_baseline(params, image);
}

std::size_t argmax(Tensor const &logits)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i)
  {
    if (logits[i] > logits[best])
    {
      best = i;
    }
  }
  return best;
}

}  // namespace maskselect
