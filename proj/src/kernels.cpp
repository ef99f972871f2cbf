#include "cbm/kernels.hpp"

#include <stdexcept>

#include "cbm/parallel.hpp"

namespace cbm {

namespace {

void check_inner(index_t a_cols, index_t b_rows, const char* who) {
  if (a_cols != b_rows)
    throw std::invalid_argument(std::string(who) + ": inner dimensions differ");
}

// Signed delta-row dot product against one dense column, ascending index
// order. Every kernel routes row sums through here so they agree bit for bit.
inline real_t delta_dot(const CsrRealMatrix& d, index_t row,
                        const real_t* column, index_t stride) {
  real_t acc = real_t(0);
  for (offset_t k = d.row_ptr[row]; k < d.row_ptr[row + 1]; ++k)
    acc += d.values[k] * column[static_cast<std::size_t>(d.col_idx[k]) * stride];
  return acc;
}

// Stage 1 row: out = delta_row * B, ascending index order per entry.
inline void delta_row_times_dense(const CsrRealMatrix& d, index_t row,
                                  const DenseMatrix& b,
                                  std::span<real_t> out) {
  for (real_t& v : out) v = real_t(0);
  for (offset_t k = d.row_ptr[row]; k < d.row_ptr[row + 1]; ++k) {
    const real_t v = d.values[k];
    const auto in = b.row(d.col_idx[k]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += v * in[j];
  }
}

// Stages 2 and 3 for the root branches in [branch_lo, branch_hi): walk each
// branch segment adding the parent row, then scale the finished segment.
// Children always read pre-scaling parents because scaling waits for the
// whole segment.
void update_branches(const CbmMatrix& c, DenseMatrix& out,
                     std::size_t branch_lo, std::size_t branch_hi) {
  const auto& chain = c.chain;
  for (std::size_t s = branch_lo; s < branch_hi; ++s) {
    const offset_t seg_lo = chain.branch_ptr[s];
    const offset_t seg_hi = chain.branch_ptr[s + 1];
    for (offset_t t = seg_lo + 1; t < seg_hi; ++t) {
      const index_t x = chain.topo_order[t];
      const auto src = out.row(chain.parent[x]);
      auto dst = out.row(x);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    if (c.is_normalized) {
      for (offset_t t = seg_lo; t < seg_hi; ++t) {
        const index_t x = chain.topo_order[t];
        const real_t s_x = c.row_scale[x];
        for (real_t& v : out.row(x)) v *= s_x;
      }
    }
  }
}

}  // namespace

OpCount count_scalar_ops(const CbmMatrix& c) {
  return {c.delta_matrix.nnz(), c.chain.non_virtual_edges()};
}

void spmv_into(const CbmMatrix& c, const DenseMatrix& v, DenseMatrix& out,
               int threads) {
  check_inner(c.n_cols, v.n_rows, "spmv");
  if (v.n_cols != 1)
    throw std::invalid_argument("spmv: operand must be a single column");
  if (out.n_rows != c.n_rows || out.n_cols != 1)
    throw std::invalid_argument("spmv: output must be n_rows x 1");

  const auto& chain = c.chain;
  const std::size_t n_branches = chain.root_children.size();
  parallel_chunks(0, n_branches, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t s = lo; s < hi; ++s) {
      for (offset_t t = chain.branch_ptr[s]; t < chain.branch_ptr[s + 1]; ++t) {
        const index_t x = chain.topo_order[t];
        real_t u = delta_dot(c.delta_matrix, x, v.data.data(), 1);
        if (chain.parent[x] != kVirtualParent) u += out.data[chain.parent[x]];
        out.data[x] = u;
      }
      if (c.is_normalized) {
        for (offset_t t = chain.branch_ptr[s]; t < chain.branch_ptr[s + 1];
             ++t) {
          const index_t x = chain.topo_order[t];
          out.data[x] *= c.row_scale[x];
        }
      }
    }
  });
}

DenseMatrix spmv(const CbmMatrix& c, const DenseMatrix& v, int threads) {
  DenseMatrix out(c.n_rows, 1);
  spmv_into(c, v, out, threads);
  return out;
}

void spmm_into(const CbmMatrix& c, const DenseMatrix& b, DenseMatrix& out,
               int threads) {
  check_inner(c.n_cols, b.n_rows, "spmm");
  if (out.n_rows != c.n_rows || out.n_cols != b.n_cols)
    throw std::invalid_argument("spmm: output has the wrong shape");

  // Stage 1: out = delta_matrix * B, independent rows.
  parallel_chunks(0, c.n_rows, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      delta_row_times_dense(c.delta_matrix, static_cast<index_t>(i), b,
                            out.row(static_cast<index_t>(i)));
  });

  // Stages 2 + 3: independent root branches.
  const std::size_t n_branches = c.chain.root_children.size();
  parallel_chunks(0, n_branches, threads, [&](std::size_t lo, std::size_t hi) {
    update_branches(c, out, lo, hi);
  });
}

DenseMatrix spmm(const CbmMatrix& c, const DenseMatrix& b, int threads) {
  DenseMatrix out(c.n_rows, b.n_cols);
  spmm_into(c, b, out, threads);
  return out;
}

DenseMatrix spmm_sequential_reference(const CbmMatrix& c,
                                      const DenseMatrix& b) {
  check_inner(c.n_cols, b.n_rows, "spmm_sequential_reference");
  DenseMatrix out(c.n_rows, b.n_cols);
  for (const index_t x : c.chain.topo_order) {
    const index_t p = c.chain.parent[x];
    for (index_t k = 0; k < b.n_cols; ++k) {
      real_t v = delta_dot(c.delta_matrix, x, b.data.data() + k, b.n_cols);
      if (p != kVirtualParent) v += out.at(p, k);
      out.at(x, k) = v;
    }
  }
  if (c.is_normalized) {
    for (index_t x = 0; x < c.n_rows; ++x) {
      const real_t s_x = c.row_scale[x];
      for (real_t& v : out.row(x)) v *= s_x;
    }
  }
  return out;
}

void csr_spmm_into(const CsrRealMatrix& a, const DenseMatrix& b,
                   DenseMatrix& out, int threads) {
  check_inner(a.n_cols, b.n_rows, "csr_spmm");
  if (out.n_rows != a.n_rows || out.n_cols != b.n_cols)
    throw std::invalid_argument("csr_spmm: output has the wrong shape");
  parallel_chunks(0, a.n_rows, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto outr = out.row(static_cast<index_t>(i));
      for (real_t& v : outr) v = real_t(0);
      for (offset_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
        const real_t v = a.values[k];
        const auto in = b.row(a.col_idx[k]);
        for (std::size_t j = 0; j < outr.size(); ++j) outr[j] += v * in[j];
      }
    }
  });
}

DenseMatrix csr_spmm(const CsrRealMatrix& a, const DenseMatrix& b,
                     int threads) {
  DenseMatrix out(a.n_rows, b.n_cols);
  csr_spmm_into(a, b, out, threads);
  return out;
}

}  // namespace cbm
