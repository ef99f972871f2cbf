#pragma once

#include "cbm/builder.hpp"
#include "cbm/csr.hpp"
#include "cbm/dense.hpp"

namespace cbm {

/// Scalar-operation budget of one compressed product, per output column.
struct OpCount {
  count_t multiply_adds = 0;  // nnz(delta_matrix)
  count_t update_adds = 0;    // non-virtual chain edges

  count_t total() const { return multiply_adds + update_adds; }

  bool operator==(const OpCount&) const = default;
};

/// multiply_adds + update_adds never exceeds nnz(A) for any input and alpha.
OpCount count_scalar_ops(const CbmMatrix& c);

/// u = A v over the compressed form: walks topo order computing
/// u_x = u_parent + delta_x . v (root rows take the delta product alone),
/// then applies row scaling in a deferred sweep so children always read
/// unscaled parents. v must be n x 1.
DenseMatrix spmv(const CbmMatrix& c, const DenseMatrix& v, int threads = 1);

/// C = A B over the compressed form, staged: (1) C = delta_matrix * B as an
/// ordinary real CSR SpMM, (2) per root branch in topo order,
/// row_x += row_parent for every non-virtual edge, (3) normalized builds
/// scale each finished branch row. Stage 1 parallelizes over output rows,
/// stages 2-3 over root branches; output is bitwise identical for any
/// thread count.
DenseMatrix spmm(const CbmMatrix& c, const DenseMatrix& b, int threads = 1);

/// spmm writing into a preallocated output. With threads == 1 this performs
/// no allocation at all: the kernels need no scratch beyond the output.
void spmm_into(const CbmMatrix& c, const DenseMatrix& b, DenseMatrix& out,
               int threads = 1);

/// spmv writing into a preallocated m x 1 output; allocation-free for
/// threads == 1.
void spmv_into(const CbmMatrix& c, const DenseMatrix& v, DenseMatrix& out,
               int threads = 1);

/// Literal chain-walk product: per edge in topo order, per column,
/// C[x,k] = C[parent,k] + delta_x . b_k. No staging; same per-row summation
/// order as spmm, so results match it bit for bit.
DenseMatrix spmm_sequential_reference(const CbmMatrix& c, const DenseMatrix& b);

/// Row-parallel real CSR SpMM with the same per-row accumulation order as
/// csr_spmm_reference (bitwise equal to it for every thread count). Baseline
/// for the benchmarks.
DenseMatrix csr_spmm(const CsrRealMatrix& a, const DenseMatrix& b,
                     int threads = 1);

void csr_spmm_into(const CsrRealMatrix& a, const DenseMatrix& b,
                   DenseMatrix& out, int threads = 1);

}  // namespace cbm
