#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbm/types.hpp"

namespace cbm {

/// Row-major dense real matrix. Used for multiplication operands, feature
/// matrices, weights and products; vectors are single-column instances.
struct DenseMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<real_t> data;  // row-major, n_rows * n_cols

  DenseMatrix() = default;

  /// Zero-initialized rows x cols matrix.
  DenseMatrix(index_t rows, index_t cols);

  /// Wraps an existing row-major buffer; throws std::invalid_argument on a
  /// size mismatch or non-finite entries.
  DenseMatrix(index_t rows, index_t cols, std::vector<real_t> values);

  static DenseMatrix identity(index_t n);

  real_t& at(index_t i, index_t j) {
    return data[static_cast<std::size_t>(i) * n_cols + j];
  }
  real_t at(index_t i, index_t j) const {
    return data[static_cast<std::size_t>(i) * n_cols + j];
  }

  std::span<real_t> row(index_t i) {
    return {data.data() + static_cast<std::size_t>(i) * n_cols, n_cols};
  }
  std::span<const real_t> row(index_t i) const {
    return {data.data() + static_cast<std::size_t>(i) * n_cols, n_cols};
  }

  bool operator==(const DenseMatrix&) const = default;
};

/// C = A * B with a fixed per-entry accumulation order (ascending inner
/// index), row-parallel. Bitwise identical for any thread count.
DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b,
                         int threads = 1);

/// x -> max(0, x) elementwise.
void relu_inplace(DenseMatrix& m);

/// Seeded uniform matrix in [lo, hi); identical across platforms.
DenseMatrix random_dense(index_t rows, index_t cols, double lo, double hi,
                         std::uint64_t seed);

}  // namespace cbm
