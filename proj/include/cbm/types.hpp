#pragma once

#include <cstdint>
#include <limits>

namespace cbm {

#if defined(CBM_SINGLE_PRECISION)
using real_t = float;
#else
using real_t = double;
#endif

using index_t = std::uint32_t;   // row / column indices
using offset_t = std::uint64_t;  // CSR row offsets, nnz counts
using count_t = std::uint64_t;   // cardinalities, distances, op counts

// Parent marker for rows attached directly to the virtual root node.
inline constexpr index_t kVirtualParent = std::numeric_limits<index_t>::max();

}  // namespace cbm
