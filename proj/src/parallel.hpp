#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pwedge::detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls f(i) for i in [0, n), split in contiguous blocks over `threads` workers.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  threads = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pwedge::detail
