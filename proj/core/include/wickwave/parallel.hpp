#pragma once

// Minimal std::thread work sharing. Reductions are chunk-ordered, so results do
// not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wickwave {

/// Process-wide default used when a caller passes workers <= 0.
int default_workers();
void set_default_workers(int workers);

inline int resolve_workers(int workers) { return workers > 0 ? workers : default_workers(); }

/// Calls f(i) for i in [0, n), dynamically scheduled over `workers` threads.
template <class F>
void parallel_for(std::size_t n, int workers, F&& f) {
  workers = std::min<int>(resolve_workers(workers), static_cast<int>(std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Sum of f(begin, end) over fixed chunks of [0, n), added in chunk order.
template <class T, class F>
T chunked_sum(std::size_t n, std::size_t chunk, int workers, F&& f) {
  chunk = std::max<std::size_t>(chunk, 1);
  const std::size_t chunks = (n + chunk - 1) / chunk;
  std::vector<T> partial(chunks, T{});
  parallel_for(chunks, workers, [&](std::size_t c) {
    partial[c] = f(c * chunk, std::min(n, (c + 1) * chunk));
  });
  T acc{};
  for (const auto& p : partial) acc += p;
  return acc;
}

}  // namespace wickwave
