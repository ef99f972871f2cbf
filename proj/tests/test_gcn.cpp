#include <stdexcept>

#include "cbm/gcn.hpp"
#include "cbm/kernels.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cbm;
using namespace cbm::test;

namespace {

// Dense evaluation of the whole two-layer pass, independent of the kernels.
DenseMatrix gcn_dense_oracle(const CsrBinaryMatrix& a, const DenseMatrix& x,
                             const GcnModel& model) {
  const DenseMatrix ahat = dense_normalized_adjacency(a);
  DenseMatrix h = dense_mm_oracle(ahat, dense_mm_oracle(x, model.w0));
  for (real_t& v : h.data)
    if (v < 0) v = 0;
  return dense_mm_oracle(dense_mm_oracle(ahat, h), model.w1);
}

}  // namespace

TEST_CASE("gcn_forward: single node identity network") {
  auto a = CsrBinaryMatrix::from_coo(1, 1, {});
  auto adj = build_cbm_normalized(a, 0);
  GcnModel model;
  model.w0 = DenseMatrix(1, 1, {1.0});
  model.w1 = DenseMatrix(1, 1, {1.0});
  DenseMatrix x(1, 1, {1.0});
  auto z = gcn_forward(adj, x, model);
  CHECK(z.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(max_abs_diff(z, gcn_forward_csr(normalized_adjacency_csr(a), x, model)) == 0.0);
}

TEST_CASE("gcn_forward: zero weights give zero logits") {
  auto a = random_binary(10, 10, 0.3, 3);
  auto adj = build_cbm_normalized(a, 0);
  GcnModel model;
  model.w0 = DenseMatrix(4, 3);
  model.w1 = DenseMatrix(3, 2);
  auto x = random_dense(10, 4, -1, 1, 5);
  for (real_t v : gcn_forward(adj, x, model).data) CHECK(v == 0.0);
  for (real_t v :
       gcn_forward_csr(normalized_adjacency_csr(a), x, model).data)
    CHECK(v == 0.0);
}

TEST_CASE("gcn_forward matches the dense oracle") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    UniformRng dims(seed * 101);
    const index_t n = 2 + static_cast<index_t>(dims.below(31));
    auto a = random_binary(n, n, 0.2, seed);
    auto adj = build_cbm_normalized(a, dims.below(3));
    auto model = GcnModel::seeded(8, 4, 3, seed * 7);
    auto x = random_dense(n, 8, -1.0, 1.0, seed * 11);
    auto z = gcn_forward(adj, x, model);
    CHECK(max_abs_diff(z, gcn_dense_oracle(a, x, model)) <= 1e-8);
  }
}

TEST_CASE("gcn_forward agrees with the csr path, wide features") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    UniformRng dims(seed);
    const index_t n = 2 + static_cast<index_t>(dims.below(63));
    auto a = random_binary(n, n, 0.15, seed);
    auto adj = build_cbm_normalized(a, 0);
    auto csr = normalized_adjacency_csr(a);
    auto model = GcnModel::seeded(500, 16, 7, seed);
    auto x = random_dense(n, 500, -1.0, 1.0, seed + 1);
    auto z_cbm = gcn_forward(adj, x, model, 2);
    auto z_csr = gcn_forward_csr(csr, x, model, 2);
    CHECK(max_abs_diff(z_cbm, z_csr) <= 1e-8);
  }
}

TEST_CASE("gcn_forward is deterministic across thread counts") {
  auto a = random_binary(40, 40, 0.2, 61);
  auto adj = build_cbm_normalized(a, 0);
  auto model = GcnModel::seeded(64, 8, 4, 62);
  auto x = random_dense(40, 64, -1.0, 1.0, 63);
  auto z1 = gcn_forward(adj, x, model, 1);
  CHECK(z1 == gcn_forward(adj, x, model, 3));
  CHECK(z1 == gcn_forward(adj, x, model, 8));
}

TEST_CASE("activation output is non-negative") {
  auto h = random_dense(6, 6, -2.0, 2.0, 9);
  relu_inplace(h);
  for (real_t v : h.data) CHECK(v >= 0.0);
}

TEST_CASE("gcn_forward validates its inputs") {
  auto a = random_binary(5, 5, 0.4, 1);
  auto plain = build_cbm(a, 0);  // not normalized
  auto model = GcnModel::seeded(4, 3, 2, 1);
  auto x = random_dense(5, 4, -1, 1, 2);
  CHECK_THROWS_AS(gcn_forward(plain, x, model), std::invalid_argument);
  auto adj = build_cbm_normalized(a, 0);
  CHECK_THROWS_AS(gcn_forward(adj, random_dense(6, 4, -1, 1, 2), model),
                  std::invalid_argument);
}

TEST_CASE("seeded model weights stay in range and reproduce") {
  auto m1 = GcnModel::seeded(20, 10, 4, 99);
  auto m2 = GcnModel::seeded(20, 10, 4, 99);
  CHECK(m1.w0 == m2.w0);
  CHECK(m1.w1 == m2.w1);
  for (real_t v : m1.w0.data) {
    CHECK(v >= -0.1);
    CHECK(v < 0.1);
  }
}

TEST_CASE("normalized_adjacency_csr matches the dense oracle") {
  for (std::uint64_t seed = 40; seed < 48; ++seed) {
    const index_t n = 1 + static_cast<index_t>(UniformRng(seed).below(40));
    auto a = random_binary(n, n, 0.25, seed);
    auto csr = normalized_adjacency_csr(a);
    auto dense = csr_spmm_reference(csr, DenseMatrix::identity(n));
    CHECK(max_abs_diff(dense, dense_normalized_adjacency(a)) <= 1e-12);
  }
}
