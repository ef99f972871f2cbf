#include "cbm/builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cbm/parallel.hpp"
#include "cbm/row_ops.hpp"

namespace cbm {

CompressionChain CompressionChain::from_parents(std::vector<index_t> parents) {
  const index_t m = static_cast<index_t>(parents.size());
  CompressionChain chain;
  chain.parent = std::move(parents);

  for (index_t x = 0; x < m; ++x) {
    const index_t p = chain.parent[x];
    if (p != kVirtualParent && (p >= m || p == x))
      throw std::invalid_argument("chain: bad parent link at row " +
                                  std::to_string(x));
  }

  // Children adjacency; filling in row order keeps each list ascending.
  std::vector<offset_t> child_ptr(static_cast<std::size_t>(m) + 1, 0);
  for (index_t x = 0; x < m; ++x)
    if (chain.parent[x] != kVirtualParent) child_ptr[chain.parent[x] + 1]++;
  for (index_t i = 0; i < m; ++i) child_ptr[i + 1] += child_ptr[i];
  std::vector<index_t> child_idx(child_ptr.back());
  {
    std::vector<offset_t> cursor(child_ptr.begin(), child_ptr.end() - 1);
    for (index_t x = 0; x < m; ++x) {
      const index_t p = chain.parent[x];
      if (p == kVirtualParent)
        chain.root_children.push_back(x);
      else
        child_idx[cursor[p]++] = x;
    }
  }

  // DFS preorder, children ascending; each root branch becomes a contiguous
  // topo segment.
  chain.topo_order.reserve(m);
  chain.branch_ptr.push_back(0);
  std::vector<index_t> stack;
  for (index_t r : chain.root_children) {
    stack.push_back(r);
    while (!stack.empty()) {
      const index_t v = stack.back();
      stack.pop_back();
      chain.topo_order.push_back(v);
      for (offset_t k = child_ptr[v + 1]; k > child_ptr[v]; --k)
        stack.push_back(child_idx[k - 1]);
    }
    chain.branch_ptr.push_back(chain.topo_order.size());
  }
  if (chain.topo_order.size() != m)
    throw std::invalid_argument("chain: parent links contain a cycle");
  return chain;
}

std::vector<CandidateEdge> build_candidate_edges(const CsrBinaryMatrix& a,
                                                 count_t alpha, int threads) {
  const index_t m = a.n_rows;
  std::vector<CandidateEdge> edges;
  edges.reserve(m);
  for (index_t x = 0; x < m; ++x) edges.push_back({0, x + 1, a.row_nnz(x)});

  // One bounded merge per unordered pair. Work is blocked over the higher
  // row index and every block owns its output slot, so the edge list is
  // identical for any thread count.
  constexpr std::size_t kBlock = 64;
  const std::size_t n_blocks = (static_cast<std::size_t>(m) + kBlock - 1) / kBlock;
  std::vector<std::vector<CandidateEdge>> per_block(n_blocks);

  parallel_chunks(0, n_blocks, threads, [&](std::size_t blo, std::size_t bhi) {
    for (std::size_t blk = blo; blk < bhi; ++blk) {
      auto& out = per_block[blk];
      const index_t x_lo = static_cast<index_t>(blk * kBlock);
      const index_t x_hi = static_cast<index_t>(
          std::min<std::size_t>((blk + 1) * kBlock, m));
      for (index_t x = x_lo; x < x_hi; ++x) {
        const count_t nx = a.row_nnz(x);
        const auto row_x = a.row(x);
        const bool x_open = nx >= alpha;  // an edge into x can survive at all
        const count_t x_keep = x_open ? nx - alpha : 0;
        for (index_t y = 0; y < x; ++y) {
          const count_t ny = a.row_nnz(y);
          const bool y_open = ny >= alpha;
          const count_t y_keep = y_open ? ny - alpha : 0;
          if (!x_open && !y_open) continue;
          const count_t bound = std::max(x_open ? x_keep : 0,
                                         y_open ? y_keep : 0);
          // weight >= |nnz difference|; skip the merge when hopeless
          const count_t lower = nx > ny ? nx - ny : ny - nx;
          if (lower > bound) continue;
          const count_t w =
              detail::bounded_symmetric_difference(row_x, a.row(y), bound);
          if (w > bound) continue;
          if (x_open && w <= x_keep) out.push_back({y + 1, x + 1, w});
          if (y_open && w <= y_keep) out.push_back({x + 1, y + 1, w});
        }
      }
    }
  });

  for (auto& blk : per_block)
    edges.insert(edges.end(), blk.begin(), blk.end());
  std::sort(edges.begin(), edges.end(), [](const CandidateEdge& a_,
                                           const CandidateEdge& b_) {
    return a_.dst != b_.dst ? a_.dst < b_.dst : a_.src < b_.src;
  });
  return edges;
}

namespace {

constexpr std::size_t kNoEdge = std::numeric_limits<std::size_t>::max();
constexpr index_t kNoCycle = std::numeric_limits<index_t>::max();

struct WorkEdge {
  index_t src = 0;  // node ids in the current contracted graph
  index_t dst = 0;
  long long weight = 0;  // reduced weight
  std::size_t orig = 0;  // index into the input edge list
};

struct ContractionRound {
  std::vector<std::size_t> sel;       // per node: orig id of its min in-edge
  std::vector<index_t> node_map;      // node -> id in the contracted graph
  std::vector<index_t> cycle_of;      // node -> cycle id or kNoCycle
  std::vector<index_t> level_of_orig; // original node -> node at this level
};

}  // namespace

CompressionChain find_min_arborescence(const std::vector<CandidateEdge>& edges,
                                       index_t m) {
  std::vector<count_t> virtual_weight(m, 0);
  std::vector<char> has_virtual(m, 0);
  for (const auto& e : edges) {
    if (e.dst == 0 || e.dst > m || e.src > m || e.src == e.dst)
      throw std::logic_error("arborescence: malformed candidate edge");
    if (e.src == 0) {
      has_virtual[e.dst - 1] = 1;
      virtual_weight[e.dst - 1] = e.weight;
    }
  }
  for (index_t x = 0; x < m; ++x)
    if (!has_virtual[x])
      throw std::logic_error("arborescence: row " + std::to_string(x) +
                             " has no virtual edge");
  if (m == 0) return CompressionChain::from_parents({});

  // Ties: lighter first, then the virtual source, then the smallest original
  // source index. Comparing original endpoints keeps every round
  // deterministic.
  auto better = [&edges](const WorkEdge& a, const WorkEdge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    const CandidateEdge& ea = edges[a.orig];
    const CandidateEdge& eb = edges[b.orig];
    if ((ea.src == 0) != (eb.src == 0)) return ea.src == 0;
    if (ea.src != eb.src) return ea.src < eb.src;
    return ea.dst < eb.dst;
  };

  std::vector<WorkEdge> work;
  work.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i)
    work.push_back({edges[i].src, edges[i].dst,
                    static_cast<long long>(edges[i].weight), i});

  std::size_t n_cur = static_cast<std::size_t>(m) + 1;
  std::vector<index_t> level_of_orig(n_cur);
  std::iota(level_of_orig.begin(), level_of_orig.end(), 0);

  std::vector<ContractionRound> rounds;
  std::vector<std::size_t> chosen;  // per node of the last level: orig edge id

  while (true) {
    std::vector<std::size_t> best(n_cur, kNoEdge);  // index into work
    for (std::size_t i = 0; i < work.size(); ++i) {
      const WorkEdge& e = work[i];
      if (best[e.dst] == kNoEdge || better(e, work[best[e.dst]]))
        best[e.dst] = i;
    }
    for (std::size_t v = 1; v < n_cur; ++v)
      if (best[v] == kNoEdge)
        throw std::logic_error("arborescence: node lost its incoming edges");

    // Cycle detection over the selected in-edges.
    std::vector<index_t> cycle_of(n_cur, kNoCycle);
    index_t n_cycles = 0;
    std::vector<int> state(n_cur, 0);  // 0 fresh, 1 on path, 2 done
    state[0] = 2;
    std::vector<std::size_t> path;
    for (std::size_t v0 = 1; v0 < n_cur; ++v0) {
      if (state[v0]) continue;
      path.clear();
      std::size_t v = v0;
      while (state[v] == 0) {
        state[v] = 1;
        path.push_back(v);
        v = work[best[v]].src;
      }
      if (state[v] == 1) {
        const auto it = std::find(path.begin(), path.end(), v);
        for (auto p = it; p != path.end(); ++p)
          cycle_of[*p] = n_cycles;
        ++n_cycles;
      }
      for (std::size_t p : path) state[p] = 2;
    }

    if (n_cycles == 0) {
      chosen.assign(n_cur, kNoEdge);
      for (std::size_t v = 1; v < n_cur; ++v) chosen[v] = work[best[v]].orig;
      break;
    }

    ContractionRound rec;
    rec.sel.assign(n_cur, kNoEdge);
    for (std::size_t v = 1; v < n_cur; ++v) rec.sel[v] = work[best[v]].orig;
    rec.cycle_of = cycle_of;
    rec.level_of_orig = level_of_orig;

    // New ids: the root stays 0; each cycle collapses onto its first member.
    rec.node_map.assign(n_cur, 0);
    std::vector<index_t> cycle_new(n_cycles, kNoCycle);
    index_t next_id = 0;
    for (std::size_t v = 0; v < n_cur; ++v) {
      const index_t c = cycle_of[v];
      if (c == kNoCycle) {
        rec.node_map[v] = next_id++;
      } else if (cycle_new[c] == kNoCycle) {
        cycle_new[c] = next_id;
        rec.node_map[v] = next_id++;
      } else {
        rec.node_map[v] = cycle_new[c];
      }
    }

    // Reduced edge list: edges into a cycle pay for the cycle edge they
    // would displace; edges inside a supernode disappear.
    std::vector<WorkEdge> next_work;
    next_work.reserve(work.size());
    for (const WorkEdge& e : work) {
      const index_t nu = rec.node_map[e.src];
      const index_t nv = rec.node_map[e.dst];
      if (nu == nv || nv == 0) continue;
      long long w = e.weight;
      if (cycle_of[e.dst] != kNoCycle) w -= work[best[e.dst]].weight;
      next_work.push_back({nu, nv, w, e.orig});
    }

    for (index_t& v : level_of_orig) v = rec.node_map[v];
    n_cur = static_cast<std::size_t>(next_id);
    work = std::move(next_work);
    rounds.push_back(std::move(rec));
  }

  // Expand contractions newest-first. A cycle keeps all of its internal
  // selections except at the node where the externally chosen edge enters.
  for (auto rit = rounds.rbegin(); rit != rounds.rend(); ++rit) {
    const ContractionRound& rec = *rit;
    const std::size_t n_level = rec.node_map.size();
    std::vector<std::size_t> expanded(n_level, kNoEdge);
    for (std::size_t v = 1; v < n_level; ++v) {
      if (rec.cycle_of[v] == kNoCycle) {
        expanded[v] = chosen[rec.node_map[v]];
      } else {
        expanded[v] = rec.sel[v];  // provisional: the cycle edge
      }
    }
    // Re-route each cycle's entry node to the external edge.
    for (std::size_t v = 1; v < n_level; ++v) {
      if (rec.cycle_of[v] == kNoCycle) continue;
      const std::size_t ext = chosen[rec.node_map[v]];
      // ext enters the cycle at the level node holding its original dst
      const index_t entry = rec.level_of_orig[edges[ext].dst];
      if (entry == static_cast<index_t>(v)) expanded[v] = ext;
    }
    chosen = std::move(expanded);
  }

  // chosen is now per original node (1..m). A row whose edge cannot beat its
  // virtual edge is reattached to the root: pointing at the root can never
  // form a cycle and the total weight does not grow.
  std::vector<index_t> parent(m, kVirtualParent);
  for (index_t x = 0; x < m; ++x) {
    const CandidateEdge& e = edges[chosen[static_cast<std::size_t>(x) + 1]];
    if (e.src == 0 || e.weight >= virtual_weight[x])
      parent[x] = kVirtualParent;
    else
      parent[x] = e.src - 1;
  }
  return CompressionChain::from_parents(std::move(parent));
}

std::vector<DeltaList> compute_delta_lists(const CsrBinaryMatrix& a,
                                           const CompressionChain& chain) {
  if (chain.parent.size() != a.n_rows)
    throw std::invalid_argument("compute_delta_lists: chain does not span a");
  std::vector<DeltaList> out(a.n_rows);
  for (index_t x = 0; x < a.n_rows; ++x) {
    DeltaList& d = out[x];
    d.row = x;
    const auto rx = a.row(x);
    if (chain.parent[x] == kVirtualParent) {
      d.plus.assign(rx.begin(), rx.end());
      continue;
    }
    const auto rp = a.row(chain.parent[x]);
    std::size_t i = 0, j = 0;
    while (i < rx.size() && j < rp.size()) {
      if (rx[i] == rp[j]) {
        ++i;
        ++j;
      } else if (rx[i] < rp[j]) {
        d.plus.push_back(rx[i++]);
      } else {
        d.minus.push_back(rp[j++]);
      }
    }
    d.plus.insert(d.plus.end(), rx.begin() + i, rx.end());
    d.minus.insert(d.minus.end(), rp.begin() + j, rp.end());
  }
  return out;
}

namespace {

CsrRealMatrix assemble_delta_matrix(index_t n_rows, index_t n_cols,
                                    const std::vector<DeltaList>& deltas) {
  std::vector<offset_t> row_ptr(static_cast<std::size_t>(n_rows) + 1, 0);
  offset_t nnz = 0;
  for (index_t x = 0; x < n_rows; ++x) {
    nnz += deltas[x].plus.size() + deltas[x].minus.size();
    row_ptr[x + 1] = nnz;
  }
  std::vector<index_t> col_idx;
  std::vector<real_t> values;
  col_idx.reserve(nnz);
  values.reserve(nnz);
  for (index_t x = 0; x < n_rows; ++x) {
    const auto& plus = deltas[x].plus;
    const auto& minus = deltas[x].minus;
    std::size_t i = 0, j = 0;
    while (i < plus.size() || j < minus.size()) {
      const bool take_plus =
          j == minus.size() || (i < plus.size() && plus[i] < minus[j]);
      if (take_plus) {
        col_idx.push_back(plus[i++]);
        values.push_back(real_t(1));
      } else {
        col_idx.push_back(minus[j++]);
        values.push_back(real_t(-1));
      }
    }
  }
  return CsrRealMatrix(n_rows, n_cols, std::move(row_ptr), std::move(col_idx),
                       std::move(values));
}

/// Pattern of A + I for a square matrix (union; idempotent if a diagonal
/// entry already exists).
CsrBinaryMatrix with_self_loops(const CsrBinaryMatrix& a) {
  std::vector<offset_t> row_ptr(static_cast<std::size_t>(a.n_rows) + 1, 0);
  std::vector<index_t> col_idx;
  col_idx.reserve(a.nnz() + a.n_rows);
  for (index_t x = 0; x < a.n_rows; ++x) {
    const auto row = a.row(x);
    bool placed = false;
    for (index_t c : row) {
      if (!placed && c >= x) {
        if (c != x) col_idx.push_back(x);
        placed = true;
      }
      col_idx.push_back(c);
    }
    if (!placed) col_idx.push_back(x);
    row_ptr[x + 1] = col_idx.size();
  }
  return CsrBinaryMatrix(a.n_rows, a.n_cols, std::move(row_ptr),
                         std::move(col_idx));
}

}  // namespace

CbmMatrix build_cbm(const CsrBinaryMatrix& a, count_t alpha, int threads) {
  CbmMatrix c;
  c.n_rows = a.n_rows;
  c.n_cols = a.n_cols;
  c.alpha = alpha;
  const auto edges = build_candidate_edges(a, alpha, threads);
  c.chain = find_min_arborescence(edges, a.n_rows);
  const auto deltas = compute_delta_lists(a, c.chain);
  c.delta_matrix = assemble_delta_matrix(a.n_rows, a.n_cols, deltas);
  return c;
}

CbmMatrix build_cbm_normalized(const CsrBinaryMatrix& a, count_t alpha,
                               int threads, DegreeMode mode) {
  if (a.n_rows != a.n_cols)
    throw std::invalid_argument("build_cbm_normalized: matrix must be square");
  const CsrBinaryMatrix aug = with_self_loops(a);

  std::vector<real_t> scale(a.n_rows);
  for (index_t x = 0; x < a.n_rows; ++x) {
    const count_t d =
        mode == DegreeMode::augmented ? aug.row_nnz(x) : a.row_nnz(x);
    if (d == 0)
      throw std::invalid_argument(
          "build_cbm_normalized: zero degree at row " + std::to_string(x) +
          " (isolated vertex with DegreeMode::original)");
    scale[x] = real_t(1) / static_cast<real_t>(std::sqrt(static_cast<double>(d)));
  }

  CbmMatrix c = build_cbm(aug, alpha, threads);
  for (offset_t k = 0; k < c.delta_matrix.nnz(); ++k)
    c.delta_matrix.values[k] *= scale[c.delta_matrix.col_idx[k]];
  c.row_scale = std::move(scale);
  c.is_normalized = true;
  return c;
}

count_t memory_footprint(const CbmMatrix& c) {
  const count_t nnz = c.delta_matrix.nnz();
  count_t bytes = 8 * (static_cast<count_t>(c.n_rows) + 1)  // delta row_ptr
                  + 4 * nnz                                 // delta col_idx
                  + 8 * nnz                                 // delta values
                  + 4 * static_cast<count_t>(c.n_rows)      // parent
                  + 4 * static_cast<count_t>(c.n_rows)      // topo_order
                  + 4 * static_cast<count_t>(c.chain.root_children.size());
  if (c.is_normalized) bytes += 8 * static_cast<count_t>(c.n_rows);
  return bytes;
}

count_t csr_bytes(const CsrBinaryMatrix& a) {
  return 8 * (static_cast<count_t>(a.n_rows) + 1) + 4 * a.nnz();
}

double compression_ratio(const CsrBinaryMatrix& a, const CbmMatrix& c) {
  return static_cast<double>(csr_bytes(a)) /
         static_cast<double>(memory_footprint(c));
}

CsrBinaryMatrix reconstruct_rows(const CbmMatrix& c) {
  std::vector<std::vector<index_t>> rows(c.n_rows);
  std::vector<index_t> scratch;
  for (const index_t x : c.chain.topo_order) {
    const auto cols = c.delta_matrix.row_cols(x);
    const auto vals = c.delta_matrix.row_values(x);
    const index_t p = c.chain.parent[x];
    if (p == kVirtualParent) {
      auto& row = rows[x];
      row.reserve(cols.size());
      for (std::size_t k = 0; k < cols.size(); ++k)
        if (vals[k] > real_t(0)) row.push_back(cols[k]);
      continue;
    }
    // (parent ∪ plus) \ minus via a three-way sorted walk
    const auto& prow = rows[p];
    scratch.clear();
    std::size_t i = 0, k = 0;
    while (i < prow.size() || k < cols.size()) {
      if (k == cols.size() || (i < prow.size() && prow[i] < cols[k])) {
        scratch.push_back(prow[i++]);
      } else if (i == prow.size() || cols[k] < prow[i]) {
        if (vals[k] > real_t(0)) scratch.push_back(cols[k]);
        ++k;
      } else {  // same column: minus removes it, plus keeps it
        if (vals[k] > real_t(0)) scratch.push_back(prow[i]);
        ++i;
        ++k;
      }
    }
    rows[x] = scratch;
  }

  std::vector<offset_t> row_ptr(static_cast<std::size_t>(c.n_rows) + 1, 0);
  std::vector<index_t> col_idx;
  for (index_t x = 0; x < c.n_rows; ++x) {
    col_idx.insert(col_idx.end(), rows[x].begin(), rows[x].end());
    row_ptr[x + 1] = col_idx.size();
  }
  return CsrBinaryMatrix(c.n_rows, c.n_cols, std::move(row_ptr),
                         std::move(col_idx));
}

DenseMatrix densify(const CbmMatrix& c) {
  const CsrBinaryMatrix pattern = reconstruct_rows(c);
  DenseMatrix d(c.n_rows, c.n_cols);
  for (index_t x = 0; x < c.n_rows; ++x) {
    for (const index_t j : pattern.row(x)) {
      d.at(x, j) = c.is_normalized ? c.row_scale[x] * c.row_scale[j]
                                   : real_t(1);
    }
  }
  return d;
}

}  // namespace cbm
