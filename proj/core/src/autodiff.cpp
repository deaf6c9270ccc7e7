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

#include "maskselect/autodiff.hpp"

#include "maskselect/errors.hpp"

#include <algorithm>
#include <cmath>

namespace maskselect {

Tensor const &Var::value() const
{
  return tape().value(index_);
}

Tensor const &Var::grad() const
{
  return tape().grad(index_);
}

Tape &Var::tape() const
{
  if (tape_ == nullptr)
  {
    throw UsageError("use of an unbound Var");
  }
  return *tape_;
}

Var Tape::leaf(Tensor value)
{
  return push(std::move(value), {}, {}, true);
}

Var Tape::constant(Tensor value)
{
  return push(std::move(value), {}, {}, false);
}

Var Tape::record(Tensor value, std::vector<Var> const &inputs, BackwardFn backward)
{
  bool needs = false;
  for (auto const &in : inputs)
  {
    if (&in.tape() == this && in.index() < nodes_.size())
    {
      needs = needs || nodes_[in.index()].requires_grad;
    }
  }
  return push(std::move(value), inputs, std::move(backward), needs);
}

Var Tape::push(Tensor value, std::vector<Var> const &inputs, BackwardFn backward, bool requires_grad)
{
  Node node;
  node.requires_grad = requires_grad;
  node.inputs.reserve(inputs.size());
  for (auto const &in : inputs)
  {
    if (&in.tape() != this || in.index() >= nodes_.size())
    {
      throw UsageError("input does not belong to this tape");
    }
    node.inputs.push_back(in.index());
  }
  node.grad     = Tensor(value.shape());
  node.value    = std::move(value);
  node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Tensor const &Tape::value(std::size_t index) const
{
  return nodes_.at(index).value;
}

Tensor const &Tape::grad(std::size_t index) const
{
  return nodes_.at(index).grad;
}

void Tape::backward(Var loss)
{
  if (&loss.tape() != this)
  {
    throw UsageError("loss does not belong to this tape");
  }
  if (!loss.value().is_scalar())
  {
    throw UsageError("backward() needs a scalar loss, got shape " +
                     shape_to_string(loss.value().shape()));
  }

  for (auto &node : nodes_)
  {
    node.grad.fill(0.0);
  }

  std::vector<char> reached(nodes_.size(), 0);
  reached[loss.index()]             = 1;
  nodes_[loss.index()].grad.data()[0] = 1.0;

  std::vector<Tensor const *> in_values;
  std::vector<Tensor *>       in_grads;
  for (std::size_t i = loss.index() + 1; i-- > 0;)
  {
    Node &node = nodes_[i];
    if (!reached[i] || node.inputs.empty() || !node.requires_grad)
    {
      continue;
    }
    in_values.clear();
    in_grads.clear();
    for (auto in : node.inputs)
    {
      in_values.push_back(&nodes_[in].value);
      in_grads.push_back(nodes_[in].requires_grad ? &nodes_[in].grad : nullptr);
      reached[in] = 1;
    }
    node.backward(BackwardArgs{in_values, node.value, node.grad, in_grads});
  }
}

std::size_t conv_output_extent(std::size_t extent, std::size_t stride, std::size_t padding)
{
  std::size_t const padded = extent + 2 * padding;
  if (stride == 0 || padded < 3)
  {
    return 0;
  }
  return (padded - 3) / stride + 1;
}

Tensor softmax(Tensor const &logits)
{
  auto const   in = logits.data();
  double const mx = *std::max_element(in.begin(), in.end());
  Tensor       out(logits.shape());
  double       total = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
  {
    out[i] = std::exp(in[i] - mx);
    total += out[i];
  }
  for (std::size_t i = 0; i < in.size(); ++i)
  {
    out[i] /= total;
  }
  return out;
}

namespace ops {

namespace {

Tape &common_tape(Var a, Var b)
{
  if (&a.tape() != &b.tape())
  {
    throw UsageError("operands live on different tapes");
  }
  return a.tape();
}

void require_same_shape(Tensor const &a, Tensor const &b, char const *op)
{
  if (a.shape() != b.shape())
  {
    throw ShapeError(std::string(op) + ": shape " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
}

struct ConvGeometry
{
  std::size_t c_in, h, w, c_out, ho, wo, stride, padding;

  std::size_t patch() const noexcept
  {
    return c_in * 9;
  }
  std::size_t positions() const noexcept
  {
    return ho * wo;
  }
};

// Column matrix of shape (c_in*9) x (ho*wo); row r = (ci, ky, kx), zero where the tap hits padding.
std::vector<double> im2col(std::span<double const> x, ConvGeometry const &g)
{
  std::vector<double> cols(g.patch() * g.positions(), 0.0);
  for (std::size_t ci = 0; ci < g.c_in; ++ci)
  {
    for (std::size_t ky = 0; ky < 3; ++ky)
    {
      for (std::size_t kx = 0; kx < 3; ++kx)
      {
        double *dst = cols.data() + ((ci * 3 + ky) * 3 + kx) * g.positions();
        for (std::size_t oy = 0; oy < g.ho; ++oy)
        {
          auto const iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                          static_cast<std::ptrdiff_t>(g.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h))
          {
            continue;
          }
          double const *src = x.data() + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox)
          {
            auto const ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                            static_cast<std::ptrdiff_t>(g.padding);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w))
            {
              dst[oy * g.wo + ox] = src[ix];
            }
          }
        }
      }
    }
  }
  return cols;
}

// Adds a column-matrix gradient back onto the input image layout.
void col2im_add(std::vector<double> const &cols, std::span<double> gx, ConvGeometry const &g)
{
  for (std::size_t ci = 0; ci < g.c_in; ++ci)
  {
    for (std::size_t ky = 0; ky < 3; ++ky)
    {
      for (std::size_t kx = 0; kx < 3; ++kx)
      {
        double const *src = cols.data() + ((ci * 3 + ky) * 3 + kx) * g.positions();
        for (std::size_t oy = 0; oy < g.ho; ++oy)
        {
          auto const iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) -
                          static_cast<std::ptrdiff_t>(g.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h))
          {
            continue;
          }
          double *dst = gx.data() + (ci * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.wo; ++ox)
          {
            auto const ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) -
                            static_cast<std::ptrdiff_t>(g.padding);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w))
            {
              dst[ix] += src[oy * g.wo + ox];
            }
          }
        }
      }
    }
  }
}

}  // namespace

Var conv2d(Var input, Var kernels, Var bias, std::size_t stride, std::size_t padding)
{
  Tape         &tape = common_tape(input, kernels);
  Tensor const &x    = input.value();
  Tensor const &k    = kernels.value();
  Tensor const &b    = bias.value();

  if (x.rank() != 3)
  {
    throw ShapeError("conv2d: input must be c x h x w, got " + shape_to_string(x.shape()));
  }
  if (k.rank() != 4 || k.dim(2) != 3 || k.dim(3) != 3)
  {
    throw ConfigError("conv2d: kernels must be c_out x c_in x 3 x 3, got " +
                      shape_to_string(k.shape()));
  }
  if (k.dim(1) != x.dim(0))
  {
    throw ConfigError("conv2d: kernels expect " + std::to_string(k.dim(1)) +
                      " input channels, input has " + std::to_string(x.dim(0)));
  }
  if (b.rank() != 1 || b.dim(0) != k.dim(0))
  {
    throw ConfigError("conv2d: bias must have " + std::to_string(k.dim(0)) + " entries");
  }
  if (stride == 0)
  {
    throw ConfigError("conv2d: stride must be positive");
  }

  ConvGeometry const g{x.dim(0),
                       x.dim(1),
                       x.dim(2),
                       k.dim(0),
                       conv_output_extent(x.dim(1), stride, padding),
                       conv_output_extent(x.dim(2), stride, padding),
                       stride,
                       padding};
  if (g.ho == 0 || g.wo == 0)
  {
    throw ConfigError("conv2d: output spatial size would be non-positive for input " +
                      shape_to_string(x.shape()));
  }

  std::vector<double> cols = im2col(x.data(), g);
  std::size_t const   np   = g.positions();
  std::size_t const   kp   = g.patch();

  Tensor out({g.c_out, g.ho, g.wo});
  auto   kd = k.data();
  for (std::size_t co = 0; co < g.c_out; ++co)
  {
    double *orow = out.data().data() + co * np;
    std::fill(orow, orow + np, b[co]);
    for (std::size_t r = 0; r < kp; ++r)
    {
      double const  wgt = kd[co * kp + r];
      double const *src = cols.data() + r * np;
      for (std::size_t p = 0; p < np; ++p)
      {
        orow[p] += wgt * src[p];
      }
    }
  }

  auto backward = [g, cols = std::move(cols)](BackwardArgs const &a) {
    std::size_t const np = g.positions();
    std::size_t const kp = g.patch();
    auto const        ks = a.inputs[1]->data();
    auto const        gd = a.grad_output.data();

    if (a.grad_inputs[2] != nullptr)
    {
      auto gb = a.grad_inputs[2]->data();
      for (std::size_t co = 0; co < g.c_out; ++co)
      {
        double acc = 0.0;
        for (std::size_t p = 0; p < np; ++p)
        {
          acc += gd[co * np + p];
        }
        gb[co] += acc;
      }
    }
    if (a.grad_inputs[1] != nullptr)
    {
      auto gk = a.grad_inputs[1]->data();
      for (std::size_t co = 0; co < g.c_out; ++co)
      {
        double const *grow = gd.data() + co * np;
        for (std::size_t r = 0; r < kp; ++r)
        {
          double const *src = cols.data() + r * np;
          double        acc = 0.0;
          for (std::size_t p = 0; p < np; ++p)
          {
            acc += grow[p] * src[p];
          }
          gk[co * kp + r] += acc;
        }
      }
    }
    if (a.grad_inputs[0] != nullptr)
    {
      std::vector<double> gcols(kp * np, 0.0);
      for (std::size_t co = 0; co < g.c_out; ++co)
      {
        double const *grow = gd.data() + co * np;
        for (std::size_t r = 0; r < kp; ++r)
        {
          double const wgt = ks[co * kp + r];
          double      *dst = gcols.data() + r * np;
          for (std::size_t p = 0; p < np; ++p)
          {
            dst[p] += wgt * grow[p];
          }
        }
      }
      col2im_add(gcols, a.grad_inputs[0]->data(), g);
    }
  };

  return tape.record(std::move(out), {input, kernels, bias}, std::move(backward));
}

Var relu(Var x)
{
  Tensor out = x.value();
  for (auto &v : out.data())
  {
    // NaN passes through so non-finite losses stay visible.
    v = v > 0.0 || std::isnan(v) ? v : 0.0;
  }
  return x.tape().record(std::move(out), {x}, [](BackwardArgs const &a) {
    auto const in = a.inputs[0]->data();
    auto const g  = a.grad_output.data();
    auto       gx = a.grad_inputs[0]->data();
    for (std::size_t i = 0; i < in.size(); ++i)
    {
      if (in[i] > 0.0)
      {
        gx[i] += g[i];
      }
    }
  });
}

Var gap(Var x)
{
  Tensor const &in = x.value();
  if (in.rank() != 3)
  {
    throw ShapeError("gap: input must have rank 3, got " + shape_to_string(in.shape()));
  }
  std::size_t const c    = in.dim(0);
  std::size_t const area = in.dim(1) * in.dim(2);
  Tensor            out({c});
  for (std::size_t ch = 0; ch < c; ++ch)
  {
    double acc = 0.0;
    for (std::size_t i = 0; i < area; ++i)
    {
      acc += in[ch * area + i];
    }
    out[ch] = acc / static_cast<double>(area);
  }
  return x.tape().record(std::move(out), {x}, [c, area](BackwardArgs const &a) {
    auto const   g     = a.grad_output.data();
    auto         gx    = a.grad_inputs[0]->data();
    double const share = 1.0 / static_cast<double>(area);
    for (std::size_t ch = 0; ch < c; ++ch)
    {
      double const gi = g[ch] * share;
      for (std::size_t i = 0; i < area; ++i)
      {
        gx[ch * area + i] += gi;
      }
    }
  });
}

Var sigmoid(Var x)
{
  Tensor out = x.value();
  for (auto &v : out.data())
  {
    // Both branches avoid overflow in exp for large |v|.
    if (v >= 0.0)
    {
      v = 1.0 / (1.0 + std::exp(-v));
    }
    else
    {
      double const e = std::exp(v);
      v              = e / (1.0 + e);
    }
  }
  return x.tape().record(std::move(out), {x}, [](BackwardArgs const &a) {
    auto const s  = a.output.data();
    auto const g  = a.grad_output.data();
    auto       gx = a.grad_inputs[0]->data();
    for (std::size_t i = 0; i < s.size(); ++i)
    {
      gx[i] += g[i] * s[i] * (1.0 - s[i]);
    }
  });
}

Var linear(Var input, Var weights, Var bias)
{
  Tape         &tape = common_tape(input, weights);
  Tensor const &x    = input.value();
  Tensor const &wt   = weights.value();
  Tensor const &b    = bias.value();
  if (x.rank() != 1 || wt.rank() != 2 || wt.dim(1) != x.dim(0))
  {
    throw ShapeError("linear: weights " + shape_to_string(wt.shape()) + " cannot multiply input " +
                     shape_to_string(x.shape()));
  }
  std::size_t const n = wt.dim(0);
  std::size_t const c = x.dim(0);
  if (b.rank() != 1 || b.dim(0) != n)
  {
    throw ShapeError("linear: bias must have " + std::to_string(n) + " entries");
  }
  Tensor out({n});
  for (std::size_t r = 0; r < n; ++r)
  {
    double acc = b[r];
    for (std::size_t j = 0; j < c; ++j)
    {
      acc += wt[r * c + j] * x[j];
    }
    out[r] = acc;
  }
  return tape.record(std::move(out), {input, weights, bias}, [n, c](BackwardArgs const &a) {
    auto const xs = a.inputs[0]->data();
    auto const ws = a.inputs[1]->data();
    auto const g  = a.grad_output.data();
    Tensor    *gx = a.grad_inputs[0];
    Tensor    *gw = a.grad_inputs[1];
    Tensor    *gb = a.grad_inputs[2];
    for (std::size_t r = 0; r < n; ++r)
    {
      if (gb != nullptr)
      {
        (*gb)[r] += g[r];
      }
      for (std::size_t j = 0; j < c; ++j)
      {
        if (gw != nullptr)
        {
          (*gw)[r * c + j] += g[r] * xs[j];
        }
        if (gx != nullptr)
        {
          (*gx)[j] += g[r] * ws[r * c + j];
        }
      }
    }
  });
}

Var softmax_cross_entropy(Var logits, std::size_t label)
{
  Tensor const &z = logits.value();
  if (z.rank() != 1)
  {
    throw ShapeError("softmax_cross_entropy: logits must be rank 1, got " +
                     shape_to_string(z.shape()));
  }
  if (label >= z.dim(0))
  {
    throw InputError("label " + std::to_string(label) + " out of range for " +
                     std::to_string(z.dim(0)) + " classes");
  }
  auto const   zd    = z.data();
  double const mx    = *std::max_element(zd.begin(), zd.end());
  double       total = 0.0;
  for (auto v : zd)
  {
    total += std::exp(v - mx);
  }
  double const loss  = std::log(total) + mx - zd[label];
  Tensor       probs = softmax(z);

  return logits.tape().record(
      Tensor::scalar(loss), {logits}, [probs = std::move(probs), label](BackwardArgs const &a) {
        double const g  = a.grad_output[0];
        auto         gz = a.grad_inputs[0]->data();
        for (std::size_t i = 0; i < probs.size(); ++i)
        {
          gz[i] += g * (probs[i] - (i == label ? 1.0 : 0.0));
        }
      });
}

Var add(Var a, Var b)
{
  Tape &tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  auto   bd  = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] += bd[i];
  }
  return tape.record(std::move(out), {a, b}, [](BackwardArgs const &args) {
    auto const g = args.grad_output.data();
    for (auto *gi : args.grad_inputs)
    {
      if (gi == nullptr)
      {
        continue;
      }
      auto d = gi->data();
      for (std::size_t i = 0; i < g.size(); ++i)
      {
        d[i] += g[i];
      }
    }
  });
}

Var mul(Var a, Var b)
{
  Tape &tape = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  auto   bd  = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i)
  {
    out[i] *= bd[i];
  }
  return tape.record(std::move(out), {a, b}, [](BackwardArgs const &args) {
    auto const g  = args.grad_output.data();
    auto const av = args.inputs[0]->data();
    auto const bv = args.inputs[1]->data();
    if (args.grad_inputs[0] != nullptr)
    {
      auto ga = args.grad_inputs[0]->data();
      for (std::size_t i = 0; i < g.size(); ++i)
      {
        ga[i] += g[i] * bv[i];
      }
    }
    if (args.grad_inputs[1] != nullptr)
    {
      auto gb = args.grad_inputs[1]->data();
      for (std::size_t i = 0; i < g.size(); ++i)
      {
        gb[i] += g[i] * av[i];
      }
    }
  });
}

Var scale(Var x, double factor)
{
  Tensor out = x.value();
  for (auto &v : out.data())
  {
    v *= factor;
  }
  return x.tape().record(std::move(out), {x}, [factor](BackwardArgs const &a) {
    auto const g  = a.grad_output.data();
    auto       gx = a.grad_inputs[0]->data();
    for (std::size_t i = 0; i < g.size(); ++i)
    {
      gx[i] += factor * g[i];
    }
  });
}

Var sum(Var x)
{
  double acc = 0.0;
  for (auto v : x.value().data())
  {
    acc += v;
  }
  return x.tape().record(Tensor::scalar(acc), {x}, [](BackwardArgs const &a) {
    double const g = a.grad_output[0];
    for (auto &v : a.grad_inputs[0]->data())
    {
      v += g;
    }
  });
}

Var abs_sum(Var x)
{
  double acc = 0.0;
  for (auto v : x.value().data())
  {
    acc += std::abs(v);
  }
  return x.tape().record(Tensor::scalar(acc), {x}, [](BackwardArgs const &a) {
    double const g  = a.grad_output[0];
    auto const   in = a.inputs[0]->data();
    auto         gx = a.grad_inputs[0]->data();
    for (std::size_t i = 0; i < in.size(); ++i)
    {
      double const sign = in[i] > 0.0 ? 1.0 : (in[i] < 0.0 ? -1.0 : 0.0);
      gx[i] += g * sign;
    }
  });
}

}  // namespace ops
}  // namespace maskselect
