#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsvm {

/// Runs body(i) for i in [0, n) on up to `workers` threads. Indices are dealt
/// round-robin so the assignment depends only on (n, workers). The first
/// exception thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (std::size_t t = 0; t < w; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += w) body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace qsvm
