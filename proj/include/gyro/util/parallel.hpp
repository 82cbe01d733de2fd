#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gyro {

/// Number of worker threads to use for a requested value (0 = all cores).
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Chunked parallel loop over [0, n).  Each index is processed exactly once
/// and writes only to its own output slot, so results do not depend on the
/// thread count or schedule.
template <typename F>
void parallel_for(std::size_t n, int threads, F&& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t chunk = 64;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const std::size_t end = begin + chunk < n ? begin + chunk : n;
      for (std::size_t i = begin; i < end; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads) - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace gyro
