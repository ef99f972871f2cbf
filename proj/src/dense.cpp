#include "cbm/dense.hpp"

#include <cmath>
#include <stdexcept>

#include "cbm/parallel.hpp"
#include "cbm/prng.hpp"

namespace cbm {

DenseMatrix::DenseMatrix(index_t rows, index_t cols)
    : n_rows(rows),
      n_cols(cols),
      data(static_cast<std::size_t>(rows) * cols, real_t(0)) {}

DenseMatrix::DenseMatrix(index_t rows, index_t cols, std::vector<real_t> values)
    : n_rows(rows), n_cols(cols), data(std::move(values)) {
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw std::invalid_argument("dense: data length must be rows * cols");
  for (real_t v : data)
    if (!std::isfinite(v))
      throw std::invalid_argument("dense: entries must be finite");
}

DenseMatrix DenseMatrix::identity(index_t n) {
  DenseMatrix m(n, n);
  for (index_t i = 0; i < n; ++i) m.at(i, i) = real_t(1);
  return m;
}

DenseMatrix dense_matmul(const DenseMatrix& a, const DenseMatrix& b,
                         int threads) {
  if (a.n_cols != b.n_rows)
    throw std::invalid_argument("dense_matmul: inner dimensions differ");
  DenseMatrix c(a.n_rows, b.n_cols);
  parallel_chunks(0, a.n_rows, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      auto out = c.row(static_cast<index_t>(i));
      const auto lhs = a.row(static_cast<index_t>(i));
      for (index_t j = 0; j < a.n_cols; ++j) {
        const real_t v = lhs[j];
        if (v == real_t(0)) continue;
        const auto in = b.row(j);
        for (index_t k = 0; k < b.n_cols; ++k) out[k] += v * in[k];
      }
    }
  });
  return c;
}

void relu_inplace(DenseMatrix& m) {
  for (real_t& v : m.data)
    if (v < real_t(0)) v = real_t(0);
}

DenseMatrix random_dense(index_t rows, index_t cols, double lo, double hi,
                         std::uint64_t seed) {
  DenseMatrix m(rows, cols);
  UniformRng rng(seed);
  for (real_t& v : m.data) v = static_cast<real_t>(rng.uniform(lo, hi));
  return m;
}

}  // namespace cbm
