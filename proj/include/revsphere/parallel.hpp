#pragma once

// Index-parallel loop over [0, n). Results must be written to per-index
// slots; aggregation happens after the join, so outcomes do not depend on
// the thread count. REVSPHERE_THREADS overrides the worker count.

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace revsphere {

inline int default_thread_count() {
  if (const char* env = std::getenv("REVSPHERE_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, int threads = default_thread_count()) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(threads, n)) - 1;
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace revsphere
