// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace airpad::nn::detail {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<Mat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const Mat<T>>;
template <typename T>
using RowVecMap = Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>;
template <typename T>
using ConstRowVecMap = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

/// out[c] += sum over rows of a row-major [rows, cols] block, rows in order.
/// Eigen's redux can reorder by pointer alignment, which breaks
/// bit-reproducible training.
template <typename T>
void add_column_sums(const T* data, std::size_t rows, std::size_t cols, T* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = data + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c];
  }
}

}  // namespace airpad::nn::detail
