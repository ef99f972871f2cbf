#include "cbm/csr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cbm {

namespace {

void check_structure(index_t n_rows, index_t n_cols,
                     const std::vector<offset_t>& row_ptr,
                     const std::vector<index_t>& col_idx) {
  if (row_ptr.size() != static_cast<std::size_t>(n_rows) + 1)
    throw std::invalid_argument("csr: row_ptr must have n_rows + 1 entries");
  if (row_ptr.front() != 0)
    throw std::invalid_argument("csr: row_ptr[0] must be 0");
  if (row_ptr.back() != col_idx.size())
    throw std::invalid_argument("csr: row_ptr back must equal nnz");
  for (index_t r = 0; r < n_rows; ++r) {
    if (row_ptr[r] > row_ptr[r + 1])
      throw std::invalid_argument("csr: row_ptr must be non-decreasing");
    for (offset_t k = row_ptr[r]; k + 1 < row_ptr[r + 1]; ++k) {
      if (col_idx[k] >= col_idx[k + 1])
        throw std::invalid_argument("csr: row " + std::to_string(r) +
                                    " is not strictly increasing");
    }
    if (row_ptr[r + 1] > row_ptr[r] && col_idx[row_ptr[r + 1] - 1] >= n_cols)
      throw std::invalid_argument("csr: column index out of range in row " +
                                  std::to_string(r));
  }
}

}  // namespace

CsrBinaryMatrix::CsrBinaryMatrix(index_t rows, index_t cols,
                                 std::vector<offset_t> rp,
                                 std::vector<index_t> ci)
    : n_rows(rows), n_cols(cols), row_ptr(std::move(rp)), col_idx(std::move(ci)) {
  check_structure(n_rows, n_cols, row_ptr, col_idx);
}

CsrBinaryMatrix CsrBinaryMatrix::from_coo(
    index_t rows, index_t cols,
    std::vector<std::pair<index_t, index_t>> entries) {
  for (const auto& [r, c] : entries) {
    if (r >= rows || c >= cols)
      throw std::invalid_argument("from_coo: entry (" + std::to_string(r) +
                                  ", " + std::to_string(c) + ") out of range");
  }
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

  CsrBinaryMatrix a;
  a.n_rows = rows;
  a.n_cols = cols;
  a.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  a.col_idx.reserve(entries.size());
  for (const auto& [r, c] : entries) {
    a.row_ptr[r + 1]++;
    a.col_idx.push_back(c);
  }
  for (index_t r = 0; r < rows; ++r) a.row_ptr[r + 1] += a.row_ptr[r];
  return a;
}

CsrRealMatrix::CsrRealMatrix(index_t rows, index_t cols,
                             std::vector<offset_t> rp, std::vector<index_t> ci,
                             std::vector<real_t> vals)
    : n_rows(rows),
      n_cols(cols),
      row_ptr(std::move(rp)),
      col_idx(std::move(ci)),
      values(std::move(vals)) {
  check_structure(n_rows, n_cols, row_ptr, col_idx);
  if (values.size() != col_idx.size())
    throw std::invalid_argument("csr: values must parallel col_idx");
  for (real_t v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("csr: values must be finite");
}

CsrRealMatrix to_real(const CsrBinaryMatrix& a, real_t value) {
  CsrRealMatrix r;
  r.n_rows = a.n_rows;
  r.n_cols = a.n_cols;
  r.row_ptr = a.row_ptr;
  r.col_idx = a.col_idx;
  r.values.assign(a.col_idx.size(), value);
  return r;
}

DenseMatrix csr_spmm_reference(const CsrRealMatrix& a, const DenseMatrix& b) {
  if (a.n_cols != b.n_rows)
    throw std::invalid_argument("csr_spmm_reference: inner dimensions differ");
  DenseMatrix c(a.n_rows, b.n_cols);
  for (index_t i = 0; i < a.n_rows; ++i) {
    auto out = c.row(i);
    for (offset_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const real_t v = a.values[k];
      const auto in = b.row(a.col_idx[k]);
      for (index_t j = 0; j < b.n_cols; ++j) out[j] += v * in[j];
    }
  }
  return c;
}

}  // namespace cbm
