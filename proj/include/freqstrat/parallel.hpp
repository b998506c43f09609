#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace freqstrat {

// Deterministic parallel loop: the index range is split into fixed chunks
// regardless of thread count, bodies write to preallocated slots, and any
// reduction happens sequentially over slots afterwards. Output is therefore
// byte-identical for any thread count.
inline void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& body) {
  if (threads <= 1 || n < 2) {
    for (std::int64_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::int64_t chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    std::int64_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace freqstrat
