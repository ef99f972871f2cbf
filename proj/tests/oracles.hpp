#pragma once

// Test-only oracles and instance generators. Everything here recomputes
// expected values through independent routes (dense arithmetic, explicit
// enumeration) and never calls the kernels or the builder it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cbm/builder.hpp"
#include "cbm/csr.hpp"
#include "cbm/dense.hpp"
#include "cbm/prng.hpp"
#include "cbm/types.hpp"

namespace cbm::test {

// ---------------------------------------------------------------------------
// Dense oracles
// ---------------------------------------------------------------------------

inline DenseMatrix densify_pattern(const CsrBinaryMatrix& a) {
  DenseMatrix d(a.n_rows, a.n_cols);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (index_t j : a.row(i)) d.at(i, j) = 1.0;
  return d;
}

/// Plain triple loop, ascending j per output entry.
inline DenseMatrix dense_mm_oracle(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.n_rows, b.n_cols);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (index_t k = 0; k < b.n_cols; ++k) {
      double acc = 0;
      for (index_t j = 0; j < a.n_cols; ++j)
        acc += double(a.at(i, j)) * double(b.at(j, k));
      c.at(i, k) = static_cast<real_t>(acc);
    }
  return c;
}

/// Dense D^(-1/2) (A + I) D^(-1/2) built entirely with dense arithmetic.
inline DenseMatrix dense_normalized_adjacency(const CsrBinaryMatrix& a,
                                              bool degrees_from_augmented = true) {
  const DenseMatrix plain = densify_pattern(a);
  DenseMatrix aug = plain;
  for (index_t i = 0; i < a.n_rows; ++i) aug.at(i, i) = 1.0;
  std::vector<double> deg(a.n_rows, 0.0);
  for (index_t i = 0; i < a.n_rows; ++i) {
    double d = 0;
    for (index_t j = 0; j < a.n_cols; ++j)
      d += degrees_from_augmented ? double(aug.at(i, j)) : double(plain.at(i, j));
    deg[i] = d;
  }
  DenseMatrix out(a.n_rows, a.n_cols);
  for (index_t i = 0; i < a.n_rows; ++i)
    for (index_t j = 0; j < a.n_cols; ++j)
      if (aug.at(i, j) != 0.0)
        out.at(i, j) =
            static_cast<real_t>(1.0 / std::sqrt(deg[i]) / std::sqrt(deg[j]));
  return out;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i)
    worst = std::max(worst, std::abs(double(a.data[i]) - double(b.data[i])));
  return worst;
}

/// XOR-popcount Hamming distance over densified rows (n_cols <= 64).
inline count_t hamming_oracle_u64(const CsrBinaryMatrix& a, index_t x, index_t y) {
  std::uint64_t bx = 0, by = 0;
  for (index_t c : a.row(x)) bx |= std::uint64_t(1) << c;
  for (index_t c : a.row(y)) by |= std::uint64_t(1) << c;
  return static_cast<count_t>(__builtin_popcountll(bx ^ by));
}

// ---------------------------------------------------------------------------
// Brute-force minimum spanning arborescence
// ---------------------------------------------------------------------------

/// Minimum total weight over all spanning arborescences of the candidate
/// graph, by exhaustive parent assignment with incremental cycle pruning.
/// Only sensible for m <= 7.
inline count_t brute_force_min_arborescence(
    const std::vector<CandidateEdge>& edges, index_t m) {
  // per-row incoming candidates: (src node, weight); src 0 is the root
  std::vector<std::vector<std::pair<index_t, count_t>>> in(m);
  for (const auto& e : edges) in[e.dst - 1].push_back({e.src, e.weight});

  count_t best = std::numeric_limits<count_t>::max();
  std::vector<index_t> parent(m, kVirtualParent);

  auto creates_cycle = [&](index_t child, index_t anc) {
    // would child <- anc close a loop, following already-assigned parents?
    index_t v = anc;
    while (v != kVirtualParent) {
      if (v == child) return true;
      v = parent[v];
    }
    return false;
  };

  auto rec = [&](auto&& self, index_t row, count_t acc) -> void {
    if (acc >= best) return;
    if (row == m) {
      best = acc;
      return;
    }
    for (const auto& [src, w] : in[row]) {
      if (src != 0) {
        const index_t p = src - 1;
        if (creates_cycle(row, p)) continue;
        parent[row] = p;
        self(self, row + 1, acc + w);
        parent[row] = kVirtualParent;
      } else {
        self(self, row + 1, acc + w);
      }
    }
  };
  rec(rec, 0, 0);
  return best;
}

/// Chain weight of an existing arborescence, recomputed from row distances
/// (virtual edges cost nnz of the row).
inline count_t chain_weight(const CsrBinaryMatrix& a,
                            const CompressionChain& chain) {
  count_t total = 0;
  for (index_t x = 0; x < a.n_rows; ++x) {
    const index_t p = chain.parent[x];
    if (p == kVirtualParent) {
      total += a.row_nnz(x);
    } else {
      count_t diff = 0;
      const auto rx = a.row(x);
      const auto rp = a.row(p);
      std::size_t i = 0, j = 0;
      while (i < rx.size() && j < rp.size()) {
        if (rx[i] == rp[j]) {
          ++i;
          ++j;
        } else if (rx[i] < rp[j]) {
          ++diff;
          ++i;
        } else {
          ++diff;
          ++j;
        }
      }
      total += diff + (rx.size() - i) + (rp.size() - j);
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// Instance generators (portable seeded streams)
// ---------------------------------------------------------------------------

inline CsrBinaryMatrix random_binary(index_t rows, index_t cols, double density,
                                     std::uint64_t seed) {
  UniformRng rng(seed);
  std::vector<std::pair<index_t, index_t>> entries;
  for (index_t i = 0; i < rows; ++i)
    for (index_t j = 0; j < cols; ++j)
      if (rng.unit() < density) entries.emplace_back(i, j);
  return CsrBinaryMatrix::from_coo(rows, cols, std::move(entries));
}

/// b blocks of k identical rows with d nonzeros each, block supports
/// disjoint: within-block distances are 0, cross-block distances 2d.
inline CsrBinaryMatrix block_graph(index_t blocks, index_t copies,
                                   index_t nnz_per_row) {
  const index_t rows = blocks * copies;
  const index_t cols = blocks * nnz_per_row;
  std::vector<std::pair<index_t, index_t>> entries;
  entries.reserve(std::size_t(rows) * nnz_per_row);
  for (index_t b = 0; b < blocks; ++b)
    for (index_t r = 0; r < copies; ++r)
      for (index_t c = 0; c < nnz_per_row; ++c)
        entries.emplace_back(b * copies + r, b * nnz_per_row + c);
  return CsrBinaryMatrix::from_coo(rows, cols, std::move(entries));
}

/// Community graph: groups of nodes sharing a base neighbor set plus a little
/// per-node noise. High average degree, strong row similarity.
inline CsrBinaryMatrix community_graph(index_t communities, index_t size,
                                       index_t base_degree, index_t noise,
                                       std::uint64_t seed) {
  const index_t n = communities * size;
  UniformRng rng(seed);
  std::vector<std::pair<index_t, index_t>> entries;
  for (index_t c = 0; c < communities; ++c) {
    std::vector<index_t> base;
    base.reserve(base_degree);
    while (base.size() < base_degree)
      base.push_back(static_cast<index_t>(rng.below(n)));
    for (index_t r = 0; r < size; ++r) {
      const index_t row = c * size + r;
      for (index_t b : base) entries.emplace_back(row, b);
      for (index_t k = 0; k < noise; ++k)
        entries.emplace_back(row, static_cast<index_t>(rng.below(n)));
    }
  }
  return CsrBinaryMatrix::from_coo(n, n, std::move(entries));
}

/// Citation-style graph: preferential attachment, directed, low in-degree.
inline CsrBinaryMatrix citation_graph(index_t nodes, std::uint64_t target_edges,
                                      std::uint64_t seed) {
  UniformRng rng(seed);
  std::vector<std::pair<index_t, index_t>> entries;
  std::vector<index_t> pool;  // endpoint pool: preferential attachment
  pool.push_back(0);
  const double per_node =
      nodes > 1 ? double(target_edges) / double(nodes - 1) : 0.0;
  double quota = 0;
  for (index_t v = 1; v < nodes; ++v) {
    quota += per_node;
    while (quota >= 1.0) {
      quota -= 1.0;
      index_t t = pool[rng.below(pool.size())];
      if (t == v) t = static_cast<index_t>(rng.below(v));
      entries.emplace_back(v, t);
      pool.push_back(t);
    }
    pool.push_back(v);
  }
  return CsrBinaryMatrix::from_coo(nodes, nodes, std::move(entries));
}

}  // namespace cbm::test
