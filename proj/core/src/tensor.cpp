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

#include "maskselect/tensor.hpp"

#include "maskselect/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace maskselect {

std::size_t shape_size(Shape const &shape)
{
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

std::string shape_to_string(Shape const &shape)
{
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i)
  {
    if (i != 0)
    {
      out += "x";
    }
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

namespace {

void validate_shape(Shape const &shape)
{
  if (shape.empty())
  {
    throw ShapeError("tensor shape must have at least one dimension");
  }
  for (auto d : shape)
  {
    if (d == 0)
    {
      throw ShapeError("tensor dimensions must be positive, got " + shape_to_string(shape));
    }
  }
}

}  // namespace

Tensor::Tensor()
  : shape_{1}
  , data_(1, 0.0)
{}

Tensor::Tensor(Shape shape, double fill)
  : shape_(std::move(shape))
{
  validate_shape(shape_);
  data_.assign(shape_size(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
  : shape_(std::move(shape))
  , data_(std::move(data))
{
  validate_shape(shape_);
  if (data_.size() != shape_size(shape_))
  {
    throw ShapeError("data length " + std::to_string(data_.size()) + " does not match shape " +
                     shape_to_string(shape_));
  }
}

Tensor Tensor::scalar(double value)
{
  return Tensor({1}, std::vector<double>{value});
}

Tensor Tensor::vector(std::initializer_list<double> values)
{
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows)
{
  std::size_t const n_rows = rows.size();
  std::size_t const n_cols = n_rows == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n_rows * n_cols);
  for (auto const &row : rows)
  {
    if (row.size() != n_cols)
    {
      throw ShapeError("ragged matrix literal");
    }
    data.insert(data.end(), row.begin(), row.end());
  }
  return Tensor({n_rows, n_cols}, std::move(data));
}

std::size_t Tensor::dim(std::size_t axis) const
{
  if (axis >= shape_.size())
  {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     shape_to_string(shape_));
  }
  return shape_[axis];
}

double &Tensor::at(std::size_t i, std::size_t j)
{
  return data_[i * shape_[1] + j];
}

double Tensor::at(std::size_t i, std::size_t j) const
{
  return data_[i * shape_[1] + j];
}

double &Tensor::at(std::size_t i, std::size_t j, std::size_t k)
{
  return data_[(i * shape_[1] + j) * shape_[2] + k];
}

double Tensor::at(std::size_t i, std::size_t j, std::size_t k) const
{
  return data_[(i * shape_[1] + j) * shape_[2] + k];
}

double Tensor::item() const
{
  if (data_.size() != 1)
  {
    throw ShapeError("item() on tensor of shape " + shape_to_string(shape_));
  }
  return data_[0];
}

void Tensor::fill(double value)
{
  std::fill(data_.begin(), data_.end(), value);
}

bool Tensor::all_finite() const noexcept
{
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor Tensor::reshaped(Shape shape) const
{
  return Tensor(std::move(shape), data_);
}

bool bitwise_equal(Tensor const &a, Tensor const &b) noexcept
{
  if (a.shape() != b.shape())
  {
    return false;
  }
  return std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(double)) == 0;
}

double max_abs_diff(Tensor const &a, Tensor const &b)
{
  if (a.shape() != b.shape())
  {
    throw ShapeError("max_abs_diff: " + shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace maskselect
