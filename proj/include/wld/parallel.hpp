#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wld {

inline unsigned resolve_threads(unsigned requested) {
  return requested ? requested : std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(c) for c in [0, chunks) on a small pool. Callers write into
/// per-chunk slots and reduce in chunk order, so results never depend on the
/// thread count. The first exception thrown by any chunk is rethrown.
template <class F>
void parallel_chunks(std::size_t chunks, unsigned threads, F&& fn) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), chunks));
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      try {
        for (std::size_t c; (c = next++) < chunks;) fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace wld
