#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fpplab {

// Fan items 0..count-1 over a fixed pool.  fn(worker, item) must derive all
// randomness from the item id and write only to item-indexed slots; then the
// result of a run is byte-identical for any worker count, because no output
// depends on which thread picked up which item.
inline void parallel_run(int64_t count, int workers, const std::function<void(int, int64_t)>& fn) {
  if (count <= 0) return;
  workers = std::max(1, workers);
  if (workers == 1 || count == 1) {
    for (int64_t i = 0; i < count; ++i) fn(0, i);
    return;
  }
  const int n_threads = static_cast<int>(std::min<int64_t>(workers, count));
  std::atomic<int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_lock;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w] {
      for (;;) {
        const int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count) return;
        try {
          fn(w, i);
        } catch (...) {
          std::scoped_lock lk(error_lock);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace fpplab
