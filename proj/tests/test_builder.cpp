#include <algorithm>
#include <stdexcept>
#include <vector>

#include "cbm/builder.hpp"
#include "cbm/row_ops.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cbm;
using namespace cbm::test;

namespace {

CsrBinaryMatrix from_rows(index_t n_cols,
                          const std::vector<std::vector<index_t>>& rows) {
  std::vector<std::pair<index_t, index_t>> entries;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (index_t c : rows[r])
      entries.emplace_back(static_cast<index_t>(r), c);
  return CsrBinaryMatrix::from_coo(static_cast<index_t>(rows.size()), n_cols,
                                   std::move(entries));
}

bool has_edge(const std::vector<CandidateEdge>& edges, index_t src, index_t dst,
              count_t w) {
  return std::find(edges.begin(), edges.end(), CandidateEdge{src, dst, w}) !=
         edges.end();
}

}  // namespace

TEST_CASE("candidate edges: dense 2x2 of ones") {
  auto a = from_rows(2, {{0, 1}, {0, 1}});
  auto edges = build_candidate_edges(a, 0);
  // virtual->0 (w 2), virtual->1 (w 2), 0->1 (w 0), 1->0 (w 0)
  CHECK(edges.size() == 4);
  CHECK(has_edge(edges, 0, 1, 2));
  CHECK(has_edge(edges, 0, 2, 2));
  CHECK(has_edge(edges, 1, 2, 0));
  CHECK(has_edge(edges, 2, 1, 0));

  // alpha = 3 prunes every pair edge (0 <= 2 - 3 fails)
  auto pruned = build_candidate_edges(a, 3);
  CHECK(pruned.size() == 2);
  CHECK(has_edge(pruned, 0, 1, 2));
  CHECK(has_edge(pruned, 0, 2, 2));
}

TEST_CASE("candidate edges: zero matrix") {
  auto a = from_rows(4, {{}, {}, {}});
  auto e0 = build_candidate_edges(a, 0);
  CHECK(e0.size() == 3 + 6);  // 3 virtual edges + all ordered pairs at w 0
  for (index_t x = 1; x <= 3; ++x) CHECK(has_edge(e0, 0, x, 0));

  auto e1 = build_candidate_edges(a, 1);
  CHECK(e1.size() == 3);  // only the virtual edges survive
}

TEST_CASE("candidate edges: list is identical across thread counts") {
  auto a = random_binary(70, 40, 0.2, 99);
  auto seq = build_candidate_edges(a, 1, 1);
  CHECK(seq == build_candidate_edges(a, 1, 2));
  CHECK(seq == build_candidate_edges(a, 1, 7));
}

TEST_CASE("arborescence: two identical rows chain through row 0") {
  auto a = from_rows(4, {{1, 2}, {1, 2}});
  auto chain = find_min_arborescence(build_candidate_edges(a, 0), 2);
  CHECK(chain.parent[0] == kVirtualParent);
  CHECK(chain.parent[1] == 0);
  CHECK(chain.root_children == std::vector<index_t>{0});
  CHECK(chain_weight(a, chain) == 2);
}

TEST_CASE("arborescence: distant rows form a star") {
  // pairwise distances >= nnz of every row -> all rows sit under the root
  auto a = from_rows(6, {{0, 1}, {2, 3}, {4, 5}});
  auto chain = find_min_arborescence(build_candidate_edges(a, 0), 3);
  for (index_t x = 0; x < 3; ++x) CHECK(chain.parent[x] == kVirtualParent);
  CHECK(chain_weight(a, chain) == a.nnz());
}

TEST_CASE("arborescence: missing virtual edge is a logic error") {
  std::vector<CandidateEdge> edges = {{0, 1, 2}};  // nothing for row 1
  CHECK_THROWS_AS(find_min_arborescence(edges, 2), std::logic_error);
}

TEST_CASE("arborescence weight never exceeds nnz and matches brute force") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    UniformRng dims(seed * 13);
    const index_t m = 1 + static_cast<index_t>(dims.below(7));
    const index_t n = 1 + static_cast<index_t>(dims.below(12));
    const count_t alpha = dims.below(3);
    auto a = random_binary(m, n, 0.1 + 0.5 * dims.unit(), seed);
    auto edges = build_candidate_edges(a, alpha);
    auto chain = find_min_arborescence(edges, m);
    const count_t w = chain_weight(a, chain);
    CHECK(w <= a.nnz());  // the star arborescence costs exactly nnz
    CHECK(w == brute_force_min_arborescence(edges, m));
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("delta lists: worked example") {
  auto a = from_rows(6, {{1, 4, 5}, {1, 3, 5}});
  CompressionChain chain = CompressionChain::from_parents({kVirtualParent, 0});
  auto deltas = compute_delta_lists(a, chain);
  CHECK(deltas[0].plus == std::vector<index_t>{1, 4, 5});  // virtual parent
  CHECK(deltas[0].minus.empty());
  CHECK(deltas[1].plus == std::vector<index_t>{3});
  CHECK(deltas[1].minus == std::vector<index_t>{4});
}

TEST_CASE("delta lists: identical rows have empty deltas") {
  auto a = from_rows(6, {{1, 3}, {1, 3}});
  CompressionChain chain = CompressionChain::from_parents({kVirtualParent, 0});
  auto deltas = compute_delta_lists(a, chain);
  CHECK(deltas[1].plus.empty());
  CHECK(deltas[1].minus.empty());
}

TEST_CASE("delta list sizes equal the chain edge weights") {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    auto a = random_binary(20, 16, 0.3, seed);
    auto c = build_cbm(a, 0);
    auto deltas = compute_delta_lists(a, c.chain);
    for (index_t x = 0; x < a.n_rows; ++x) {
      const index_t p = c.chain.parent[x];
      const count_t expect = p == kVirtualParent
                                 ? a.row_nnz(x)
                                 : hamming_distance(a, x, p);
      CHECK(deltas[x].plus.size() + deltas[x].minus.size() == expect);
    }
  }
}

TEST_CASE("build_cbm: identical-rows pair compresses to two deltas") {
  auto a = from_rows(3, {{0, 1}, {0, 1}});
  auto c = build_cbm(a, 0);
  CHECK(c.delta_matrix.nnz() == 2);
  CHECK(a.nnz() == 4);
  CHECK(c.delta_matrix.row_cols(0).size() == 2);
  CHECK(c.delta_matrix.row_cols(1).empty());
  CHECK(c.delta_matrix.values[0] == 1.0);
  CHECK(c.delta_matrix.values[1] == 1.0);
}

TEST_CASE("build_cbm: identity pattern cannot compress") {
  auto a = from_rows(5, {{0}, {1}, {2}, {3}, {4}});
  auto c = build_cbm(a, 0);
  CHECK(c.delta_matrix.nnz() == a.nnz());
  for (index_t x = 0; x < 5; ++x) CHECK(c.chain.parent[x] == kVirtualParent);
}

TEST_CASE("build_cbm: zero matrix has an empty delta matrix") {
  auto a = from_rows(4, {{}, {}, {}});
  auto c = build_cbm(a, 0);
  CHECK(c.delta_matrix.nnz() == 0);
  // empty rows always attach to the root
  for (index_t x = 0; x < 3; ++x) CHECK(c.chain.parent[x] == kVirtualParent);
}

TEST_CASE("delta-count bound: delta nnz never exceeds nnz(A)") {
  for (std::uint64_t seed = 300; seed < 360; ++seed) {
    UniformRng dims(seed);
    const index_t m = 1 + static_cast<index_t>(dims.below(32));
    const index_t n = 1 + static_cast<index_t>(dims.below(32));
    auto a = random_binary(m, n, 0.05 + 0.45 * dims.unit(), seed);
    for (count_t alpha : {0, 1, 2, 4, 8}) {
      auto c = build_cbm(a, alpha);
      CHECK(c.delta_matrix.nnz() <= a.nnz());
    }
  }
}

TEST_CASE("round trip: replaying the chain reconstructs A exactly") {
  for (std::uint64_t seed = 400; seed < 440; ++seed) {
    UniformRng dims(seed);
    const index_t m = 1 + static_cast<index_t>(dims.below(40));
    const index_t n = 1 + static_cast<index_t>(dims.below(40));
    auto a = random_binary(m, n, 0.05 + 0.4 * dims.unit(), seed);
    auto c = build_cbm(a, dims.below(4));
    CHECK(reconstruct_rows(c) == a);
  }
}

TEST_CASE("monotonicity: larger alpha never adds non-virtual edges") {
  for (std::uint64_t seed = 500; seed < 520; ++seed) {
    auto a = random_binary(24, 20, 0.35, seed);
    count_t prev = std::numeric_limits<count_t>::max();
    for (count_t alpha : {0, 1, 2, 4, 8, 16}) {
      auto c = build_cbm(a, alpha);
      const count_t nv = c.chain.non_virtual_edges();
      CHECK(nv <= prev);
      prev = nv;
    }
  }
}

TEST_CASE("determinism: identical chains across runs and thread counts") {
  auto a = random_binary(48, 40, 0.25, 31337);
  auto c1 = build_cbm(a, 1, 1);
  auto c2 = build_cbm(a, 1, 4);
  auto c3 = build_cbm(a, 1, 16);
  CHECK(c1.chain == c2.chain);
  CHECK(c1.chain == c3.chain);
  CHECK(c1.delta_matrix == c2.delta_matrix);
  CHECK(c1.delta_matrix == c3.delta_matrix);
}

TEST_CASE("normalized build: single node") {
  auto a = from_rows(1, {{}});
  auto c = build_cbm_normalized(a, 0);
  CHECK(c.is_normalized);
  auto d = densify(c);
  CHECK(d.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized build: two-node path") {
  auto a = from_rows(2, {{1}, {0}});
  auto c = build_cbm_normalized(a, 0);
  auto d = densify(c);
  for (index_t i = 0; i < 2; ++i)
    for (index_t j = 0; j < 2; ++j)
      CHECK(d.at(i, j) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("normalized build: densified form equals the dense oracle") {
  for (std::uint64_t seed = 600; seed < 625; ++seed) {
    UniformRng dims(seed);
    const index_t n = 1 + static_cast<index_t>(dims.below(64));
    auto a = random_binary(n, n, 0.1 + 0.3 * dims.unit(), seed);
    auto c = build_cbm_normalized(a, dims.below(3));
    CHECK(max_abs_diff(densify(c), dense_normalized_adjacency(a)) <= 1e-12);
    // the replayed pattern is the pattern of A + I
    auto pattern = reconstruct_rows(c);
    auto oracle = dense_normalized_adjacency(a);
    for (index_t i = 0; i < n; ++i)
      for (index_t j = 0; j < n; ++j) {
        const bool present =
            std::ranges::binary_search(pattern.row(i), j);
        CHECK(present == (oracle.at(i, j) != 0.0));
      }
  }
}

TEST_CASE("normalized build rejects non-square input") {
  auto a = from_rows(3, {{0}, {1}});
  CHECK_THROWS_AS(build_cbm_normalized(a, 0), std::invalid_argument);
}

TEST_CASE("degree mode: original errors on isolated vertices") {
  auto isolated = from_rows(2, {{1}, {}});
  CHECK_THROWS_AS(
      build_cbm_normalized(isolated, 0, 1, DegreeMode::original),
      std::invalid_argument);
  // without isolation the mode works and differs from the default
  auto path = from_rows(2, {{1}, {0}});
  auto orig = build_cbm_normalized(path, 0, 1, DegreeMode::original);
  auto d = densify(orig);
  CHECK(d.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));  // deg_A = 1
}

TEST_CASE("memory footprint: block graph byte formula") {
  // 8 blocks x 12 identical rows x 6 nnz: delta nnz = blocks * d
  auto a = block_graph(8, 12, 6);
  auto c = build_cbm(a, 0);
  CHECK(c.delta_matrix.nnz() == 8 * 6);
  CHECK(a.nnz() == 8 * 12 * 6);
  const count_t m = a.n_rows;
  const count_t expected = 8 * (m + 1) + 4 * c.delta_matrix.nnz() +
                           8 * c.delta_matrix.nnz() + 4 * m + 4 * m +
                           4 * c.chain.root_children.size();
  CHECK(memory_footprint(c) == expected);
  CHECK(csr_bytes(a) == 8 * (m + 1) + 4 * a.nnz());
  CHECK(compression_ratio(a, c) ==
        double(csr_bytes(a)) / double(expected));
  CHECK(compression_ratio(a, c) > 1.0);
}

TEST_CASE("memory footprint: incompressible matrix lands below ratio 1") {
  auto a = from_rows(6, {{0}, {1}, {2}, {3}, {4}, {5}});
  auto c = build_cbm(a, 0);
  CHECK(compression_ratio(a, c) < 1.0);  // chain overhead dominates
}

TEST_CASE("memory footprint: zero matrix is chain arrays only") {
  auto a = from_rows(4, {{}, {}, {}});
  auto c = build_cbm(a, 0);
  const count_t m = 3;
  CHECK(memory_footprint(c) == 8 * (m + 1) + 4 * m + 4 * m + 4 * m);
}

TEST_CASE("chain topo order is a DFS preorder with contiguous branches") {
  for (std::uint64_t seed = 700; seed < 715; ++seed) {
    auto a = random_binary(30, 24, 0.3, seed);
    auto c = build_cbm(a, 0);
    const auto& ch = c.chain;
    std::vector<offset_t> pos(a.n_rows);
    for (offset_t i = 0; i < ch.topo_order.size(); ++i)
      pos[ch.topo_order[i]] = i;
    for (index_t x = 0; x < a.n_rows; ++x)
      if (ch.parent[x] != kVirtualParent)
        CHECK(pos[ch.parent[x]] < pos[x]);  // parents precede children
    CHECK(ch.branch_ptr.front() == 0);
    CHECK(ch.branch_ptr.back() == a.n_rows);
    for (std::size_t s = 0; s < ch.root_children.size(); ++s)
      CHECK(ch.topo_order[ch.branch_ptr[s]] == ch.root_children[s]);
  }
}
