#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace cbm {

/// Splits [begin, end) into at most `threads` contiguous chunks and runs
/// fn(chunk_begin, chunk_end) on each. threads <= 1 runs inline, spawning
/// nothing. Chunk boundaries depend only on (begin, end, threads), so any
/// fn that writes to disjoint per-index slots is deterministic.
template <typename Fn>
void parallel_chunks(std::size_t begin, std::size_t end, int threads, Fn&& fn) {
  const std::size_t n = end > begin ? end - begin : 0;
  if (n == 0) return;
  if (threads <= 1 || n == 1) {
    fn(begin, end);
    return;
  }
  std::size_t parts = static_cast<std::size_t>(threads);
  if (parts > n) parts = n;
  std::vector<std::thread> pool;
  pool.reserve(parts - 1);
  for (std::size_t t = 1; t < parts; ++t) {
    const std::size_t lo = begin + (n * t) / parts;
    const std::size_t hi = begin + (n * (t + 1)) / parts;
    if (lo < hi) pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  fn(begin, begin + n / parts);
  for (auto& th : pool) th.join();
}

}  // namespace cbm
