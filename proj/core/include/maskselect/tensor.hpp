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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace maskselect {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(Shape const &shape);
std::string shape_to_string(Shape const &shape);

/**
 * Dense row-major array of doubles.
 *
 * The element count always equals the product of the shape. Every dimension
 * is positive; a scalar is represented with shape {1}.
 */
class Tensor
{
public:
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value);
  static Tensor vector(std::initializer_list<double> values);
  /// Builds a rank-2 tensor from nested rows; all rows must have equal length.
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);

  Shape const &shape() const noexcept
  {
    return shape_;
  }
  std::size_t rank() const noexcept
  {
    return shape_.size();
  }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept
  {
    return data_.size();
  }
  bool is_scalar() const noexcept
  {
    return data_.size() == 1;
  }

  std::span<double> data() noexcept
  {
    return data_;
  }
  std::span<double const> data() const noexcept
  {
    return data_;
  }

  double &operator[](std::size_t i) noexcept
  {
    return data_[i];
  }
  double operator[](std::size_t i) const noexcept
  {
    return data_[i];
  }

  double &at(std::size_t i, std::size_t j);
  double  at(std::size_t i, std::size_t j) const;
  double &at(std::size_t i, std::size_t j, std::size_t k);
  double  at(std::size_t i, std::size_t j, std::size_t k) const;

  /// Value of a single-element tensor.
  double item() const;

  void fill(double value);
  bool all_finite() const noexcept;
  Tensor reshaped(Shape shape) const;

  bool operator==(Tensor const &other) const = default;

private:
  Shape               shape_;
  std::vector<double> data_;
};

/// True when both tensors share a shape and every element has identical bits.
bool bitwise_equal(Tensor const &a, Tensor const &b) noexcept;

/// Largest |a_i - b_i|; throws ShapeError on shape mismatch.
double max_abs_diff(Tensor const &a, Tensor const &b);

}  // namespace maskselect
