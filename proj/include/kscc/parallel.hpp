#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kscc {

/// Runs body(i) for i in [0, n) on up to `threads` workers. Tasks must write
/// only to disjoint slots; completion order is unobservable, so results are
/// identical for any thread count.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  if (n == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace kscc
