#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace tvmed {

/// Worker count: explicit value, else TVMED_WORKERS, else hardware threads.
inline std::size_t resolve_workers(std::optional<std::size_t> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("TVMED_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Indices are handed
/// out dynamically; fn must only write state owned by index i. The first
/// exception thrown is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min(workers, n);
  pool.reserve(count);
  for (std::size_t w = 0; w < count; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace tvmed
