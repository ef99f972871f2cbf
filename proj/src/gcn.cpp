#include "cbm/gcn.hpp"

#include <cmath>
#include <stdexcept>

#include "cbm/kernels.hpp"
#include "cbm/prng.hpp"

namespace cbm {

GcnModel GcnModel::seeded(index_t features, index_t hidden, index_t classes,
                          std::uint64_t seed) {
  GcnModel m;
  UniformRng rng(seed);
  m.w0 = DenseMatrix(features, hidden);
  for (real_t& v : m.w0.data) v = static_cast<real_t>(rng.uniform(-0.1, 0.1));
  m.w1 = DenseMatrix(hidden, classes);
  for (real_t& v : m.w1.data) v = static_cast<real_t>(rng.uniform(-0.1, 0.1));
  return m;
}

DenseMatrix gcn_forward(const CbmMatrix& adj, const DenseMatrix& x,
                        const GcnModel& model, int threads) {
  if (!adj.is_normalized)
    throw std::invalid_argument("gcn_forward: adjacency must be normalized");
  if (adj.n_cols != x.n_rows)
    throw std::invalid_argument("gcn_forward: feature rows must match nodes");
  DenseMatrix h = dense_matmul(x, model.w0, threads);  // X W0 first: h <= f
  h = spmm(adj, h, threads);
  relu_inplace(h);
  h = spmm(adj, h, threads);
  return dense_matmul(h, model.w1, threads);
}

DenseMatrix gcn_forward_csr(const CsrRealMatrix& adj, const DenseMatrix& x,
                            const GcnModel& model, int threads) {
  if (adj.n_rows != adj.n_cols)
    throw std::invalid_argument("gcn_forward_csr: adjacency must be square");
  if (adj.n_cols != x.n_rows)
    throw std::invalid_argument("gcn_forward_csr: feature rows must match nodes");
  DenseMatrix h = dense_matmul(x, model.w0, threads);
  h = csr_spmm(adj, h, threads);
  relu_inplace(h);
  h = csr_spmm(adj, h, threads);
  return dense_matmul(h, model.w1, threads);
}

CsrRealMatrix normalized_adjacency_csr(const CsrBinaryMatrix& a,
                                       DegreeMode mode) {
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("normalized_adjacency_csr: matrix must be square");

  // Pattern of A + I as sorted per-row merges.
  std::vector<offset_t> row_ptr(static_cast<std::size_t>(a.n_rows) + 1, 0);
  std::vector<index_t> col_idx;
  col_idx.reserve(a.nnz() + a.n_rows);
  for (index_t x = 0; x < a.n_rows; ++x) {
    bool placed = false;
    for (index_t c : a.row(x)) {
      if (!placed && c >= x) {
        if (c != x) col_idx.push_back(x);
        placed = true;
      }
      col_idx.push_back(c);
    }
    if (!placed) col_idx.push_back(x);
    row_ptr[x + 1] = col_idx.size();
  }

  std::vector<real_t> scale(a.n_rows);
  for (index_t x = 0; x < a.n_rows; ++x) {
    const count_t d = mode == DegreeMode::augmented
                          ? row_ptr[x + 1] - row_ptr[x]
                          : a.row_nnz(x);
    if (d == 0)
      throw std::invalid_argument(
          "normalized_adjacency_csr: zero degree at row " + std::to_string(x) +
          " (isolated vertex with DegreeMode::original)");
    scale[x] = real_t(1) / static_cast<real_t>(std::sqrt(static_cast<double>(d)));
  }

  std::vector<real_t> values(col_idx.size());
  for (index_t x = 0; x < a.n_rows; ++x)
    for (offset_t k = row_ptr[x]; k < row_ptr[x + 1]; ++k)
      values[k] = scale[x] * scale[col_idx[k]];

  return CsrRealMatrix(a.n_rows, a.n_cols, std::move(row_ptr),
                       std::move(col_idx), std::move(values));
}

}  // namespace cbm
