#pragma once

#include <vector>

#include "cbm/csr.hpp"
#include "cbm/types.hpp"

namespace cbm {

/// Directed edge of the extended distance graph. Node ids live in [0, m]:
/// node 0 is the virtual root (the null row) and row r is node r + 1.
/// Virtual edges weigh nnz(a_dst); row-to-row edges weigh the Hamming
/// distance and only exist where weight <= nnz(a_dst) - alpha.
struct CandidateEdge {
  index_t src = 0;
  index_t dst = 0;
  count_t weight = 0;

  bool operator==(const CandidateEdge&) const = default;
};

/// Spanning arborescence of the distance graph rooted at the virtual node.
/// parent[x] is a row index or kVirtualParent. topo_order is the DFS preorder
/// with children visited in ascending row index, so every subtree occupies a
/// contiguous segment; branch_ptr marks the segment of each root branch.
struct CompressionChain {
  std::vector<index_t> parent;         // per row
  std::vector<index_t> topo_order;     // permutation of rows, parents first
  std::vector<index_t> root_children;  // rows with parent == kVirtualParent

  // Derived, rebuilt from parent (never serialized): root branch i owns
  // topo_order[branch_ptr[i] .. branch_ptr[i+1]).
  std::vector<offset_t> branch_ptr;

  /// Builds topo_order / root_children / branch_ptr from parent links.
  /// Throws std::invalid_argument on cycles or out-of-range parents.
  static CompressionChain from_parents(std::vector<index_t> parents);

  count_t non_virtual_edges() const {
    return parent.size() - root_children.size();
  }

  bool operator==(const CompressionChain&) const = default;
};

/// Column deltas of one row against its parent row: a_x equals
/// (a_parent ∪ plus) \ minus; plus and minus are sorted and disjoint.
struct DeltaList {
  index_t row = 0;
  std::vector<index_t> plus;
  std::vector<index_t> minus;

  bool operator==(const DeltaList&) const = default;
};

/// Which matrix the normalization degrees are taken from.
enum class DegreeMode {
  augmented,  // degrees of A + I (default; degrees are never zero)
  original,   // degrees of A alone; rejects graphs with isolated vertices
};

/// A binary matrix in compressed form: the chain plus a signed delta matrix
/// (+1 at added columns, -1 at removed ones). The normalized variant stores
/// column-scaled delta values together with per-row output scales and
/// represents D^(-1/2) (A + I) D^(-1/2).
struct CbmMatrix {
  index_t n_rows = 0;
  index_t n_cols = 0;
  CompressionChain chain;
  CsrRealMatrix delta_matrix;
  count_t alpha = 0;
  std::vector<real_t> row_scale;  // n_rows entries iff is_normalized
  bool is_normalized = false;
};

/// All surviving edges of the extended distance graph, sorted by (dst, src).
/// Per row pair one linear merge is done, with an early abort once the
/// distance can no longer beat either direction's pruning threshold; the
/// virtual edges are always present. Pair work may be split across threads;
/// the result is identical for any thread count.
std::vector<CandidateEdge> build_candidate_edges(const CsrBinaryMatrix& a,
                                                 count_t alpha,
                                                 int threads = 1);

/// Minimum-weight spanning arborescence rooted at the virtual node
/// (Chu-Liu/Edmonds). Ties prefer the virtual edge, then the smallest source
/// index; a row whose chosen edge cannot beat its virtual edge is reattached
/// to the root. Throws std::logic_error if some row has no virtual edge.
CompressionChain find_min_arborescence(const std::vector<CandidateEdge>& edges,
                                       index_t m);

/// Per-row deltas against the chain parent (plus = a_x \ a_parent,
/// minus = a_parent \ a_x), computed by linear merge, in row order.
std::vector<DeltaList> compute_delta_lists(const CsrBinaryMatrix& a,
                                           const CompressionChain& chain);

/// Full construction pipeline: candidate edges -> arborescence -> deltas ->
/// signed delta matrix.
CbmMatrix build_cbm(const CsrBinaryMatrix& a, count_t alpha, int threads = 1);

/// Builds the compressed form of (A + I) and scales it so the represented
/// matrix is D^(-1/2) (A + I) D^(-1/2): delta values at column j carry
/// d_j^(-1/2) and row_scale[x] = d_x^(-1/2). Requires a square input.
CbmMatrix build_cbm_normalized(const CsrBinaryMatrix& a, count_t alpha,
                               int threads = 1,
                               DegreeMode mode = DegreeMode::augmented);

// Byte model used for footprint and ratio (and nothing else): 4-byte column
// indices, 8-byte row offsets, 8-byte values for real matrices, 0-byte values
// for pattern CSR. The chain is charged for parent, topo_order and
// root_children.

/// Bytes of the compressed representation: delta matrix in CSR plus the
/// chain arrays (plus row_scale when normalized).
count_t memory_footprint(const CbmMatrix& c);

/// Bytes of the pattern CSR representation under the same byte model.
count_t csr_bytes(const CsrBinaryMatrix& a);

/// csr_bytes(a) / memory_footprint(c).
double compression_ratio(const CsrBinaryMatrix& a, const CbmMatrix& c);

/// Replays the chain from the virtual node and returns the represented
/// pattern (A, or the pattern of A + I for normalized builds).
CsrBinaryMatrix reconstruct_rows(const CbmMatrix& c);

/// Dense copy of the represented real matrix (0/1 entries, or the normalized
/// adjacency). Pure chain replay, independent of the multiplication kernels.
DenseMatrix densify(const CbmMatrix& c);

}  // namespace cbm
