#pragma once

#include <span>

#include "cbm/csr.hpp"
#include "cbm/types.hpp"

namespace cbm {

/// |a_x ∩ a_y| by a linear merge of the two sorted index lists.
count_t row_intersection_size(const CsrBinaryMatrix& a, index_t x, index_t y);

/// nnz(a_x) + nnz(a_y) - 2|a_x ∩ a_y|: the number of deltas needed to turn
/// one row into the other. Symmetric.
count_t hamming_distance(const CsrBinaryMatrix& a, index_t x, index_t y);

namespace detail {

/// Symmetric-difference size of two sorted index lists, aborting once the
/// running count exceeds `bound` (returns bound + 1 in that case).
count_t bounded_symmetric_difference(std::span<const index_t> x,
                                     std::span<const index_t> y,
                                     count_t bound);

}  // namespace detail

}  // namespace cbm
