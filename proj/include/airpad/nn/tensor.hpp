// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "airpad/error.hpp"

namespace airpad::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor. Batched tensors carry the batch as dimension 0.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{})
      : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> values) : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != shape_size(shape_)) {
      throw Error(ErrorCode::kShapeMismatch, "tensor " + shape_string(shape_) + " given " +
                                                 std::to_string(values_.size()) + " values");
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  /// Shape without the leading batch dimension.
  Shape sample_shape() const { return Shape(shape_.begin() + 1, shape_.end()); }

  void reshape(Shape shape) {
    if (shape_size(shape) != values_.size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
    }
    shape_ = std::move(shape);
  }

  void fill(T v) { std::fill(values_.begin(), values_.end(), v); }

  template <typename U>
  Tensor<U> cast() const {
    return Tensor<U>(shape_, std::vector<U>(values_.begin(), values_.end()));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<T> values_;
};

/// Batch shape {n} ++ sample.
Shape batched(std::size_t n, const Shape& sample);

}  // namespace airpad::nn
