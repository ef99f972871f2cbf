#pragma once

#include <cstdint>

#include "cbm/builder.hpp"
#include "cbm/csr.hpp"
#include "cbm/dense.hpp"

namespace cbm {

/// Two-layer graph convolution weights; the activation is fixed to the
/// rectifier max(0, x).
struct GcnModel {
  DenseMatrix w0;  // features x hidden
  DenseMatrix w1;  // hidden x classes

  /// Weights drawn uniformly from [-0.1, 0.1] with a portable seeded stream.
  static GcnModel seeded(index_t features, index_t hidden, index_t classes,
                         std::uint64_t seed);
};

/// Forward pass A_hat * relu(A_hat * (X W0)) * W1 over a normalized
/// compressed adjacency. X W0 is formed first (the hidden width is usually
/// smaller than the feature width, which shrinks the sparse product operand).
/// Returns logits, no softmax.
DenseMatrix gcn_forward(const CbmMatrix& adj, const DenseMatrix& x,
                        const GcnModel& model, int threads = 1);

/// Same pass with the normalized adjacency held in real CSR; the sparse
/// products use the plain CSR kernel. Baseline for benchmarking and
/// equivalence checks.
DenseMatrix gcn_forward_csr(const CsrRealMatrix& adj, const DenseMatrix& x,
                            const GcnModel& model, int threads = 1);

/// D^(-1/2) (A + I) D^(-1/2) materialized in real CSR.
CsrRealMatrix normalized_adjacency_csr(const CsrBinaryMatrix& a,
                                       DegreeMode mode = DegreeMode::augmented);

}  // namespace cbm
