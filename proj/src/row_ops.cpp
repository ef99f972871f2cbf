#include "cbm/row_ops.hpp"

#include <stdexcept>
#include <string>

namespace cbm {

namespace {

void check_row(const CsrBinaryMatrix& a, index_t r, const char* who) {
  if (r >= a.n_rows)
    throw std::out_of_range(std::string(who) + ": row " + std::to_string(r) +
                            " out of range (n_rows = " +
                            std::to_string(a.n_rows) + ")");
}

}  // namespace

count_t row_intersection_size(const CsrBinaryMatrix& a, index_t x, index_t y) {
  check_row(a, x, "row_intersection_size");
  check_row(a, y, "row_intersection_size");
  const auto rx = a.row(x);
  const auto ry = a.row(y);
  count_t common = 0;
  std::size_t i = 0, j = 0;
  while (i < rx.size() && j < ry.size()) {
    if (rx[i] == ry[j]) {
      ++common;
      ++i;
      ++j;
    } else if (rx[i] < ry[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return common;
}

count_t hamming_distance(const CsrBinaryMatrix& a, index_t x, index_t y) {
  check_row(a, x, "hamming_distance");
  check_row(a, y, "hamming_distance");
  const count_t common = row_intersection_size(a, x, y);
  return a.row_nnz(x) + a.row_nnz(y) - 2 * common;
}

namespace detail {

count_t bounded_symmetric_difference(std::span<const index_t> x,
                                     std::span<const index_t> y,
                                     count_t bound) {
  count_t diff = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (diff > bound) return bound + 1;
    if (x[i] == y[j]) {
      ++i;
      ++j;
    } else if (x[i] < y[j]) {
      ++diff;
      ++i;
    } else {
      ++diff;
      ++j;
    }
  }
  diff += (x.size() - i) + (y.size() - j);
  return diff > bound ? bound + 1 : diff;
}

}  // namespace detail

}  // namespace cbm
