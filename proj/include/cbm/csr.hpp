#pragma once

#include <span>
#include <utility>
#include <vector>

#include "cbm/dense.hpp"
#include "cbm/types.hpp"

namespace cbm {

/// Pattern-only sparse matrix in CSR layout: each row stores the strictly
/// increasing column indices of its nonzero entries (its adjacency list).
struct CsrBinaryMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<offset_t> row_ptr;  // n_rows + 1, non-decreasing, row_ptr[0] == 0
  std::vector<index_t> col_idx;   // concatenated sorted rows

  CsrBinaryMatrix() : row_ptr(1, 0) {}

  /// Takes ownership of prebuilt CSR arrays; throws std::invalid_argument if
  /// they violate the structural invariants.
  CsrBinaryMatrix(index_t rows, index_t cols, std::vector<offset_t> rp,
                  std::vector<index_t> ci);

  /// Builds from (row, col) entries: sorts rows, drops duplicates, validates
  /// index ranges. Nothing is rejected silently.
  static CsrBinaryMatrix from_coo(index_t rows, index_t cols,
                                  std::vector<std::pair<index_t, index_t>> entries);

  offset_t nnz() const { return row_ptr.back(); }
  count_t row_nnz(index_t r) const { return row_ptr[r + 1] - row_ptr[r]; }

  std::span<const index_t> row(index_t r) const {
    return {col_idx.data() + row_ptr[r], static_cast<std::size_t>(row_nnz(r))};
  }

  bool operator==(const CsrBinaryMatrix&) const = default;
};

/// CSR matrix with real values parallel to col_idx.
struct CsrRealMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  std::vector<offset_t> row_ptr;
  std::vector<index_t> col_idx;
  std::vector<real_t> values;

  CsrRealMatrix() : row_ptr(1, 0) {}

  CsrRealMatrix(index_t rows, index_t cols, std::vector<offset_t> rp,
                std::vector<index_t> ci, std::vector<real_t> vals);

  offset_t nnz() const { return row_ptr.back(); }

  std::span<const index_t> row_cols(index_t r) const {
    return {col_idx.data() + row_ptr[r],
            static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
  }
  std::span<const real_t> row_values(index_t r) const {
    return {values.data() + row_ptr[r],
            static_cast<std::size_t>(row_ptr[r + 1] - row_ptr[r])};
  }

  bool operator==(const CsrRealMatrix&) const = default;
};

/// Copies the pattern into a real CSR matrix with a constant value.
CsrRealMatrix to_real(const CsrBinaryMatrix& a, real_t value = real_t(1));

/// Reference sparse-dense product: C[i,k] = sum_j a[i,j] * b[j,k], accumulated
/// in ascending column order, exactly nnz(a) multiply-adds per output column.
/// Single-threaded baseline and oracle.
DenseMatrix csr_spmm_reference(const CsrRealMatrix& a, const DenseMatrix& b);

}  // namespace cbm
