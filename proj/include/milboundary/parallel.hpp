#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace milb {

// Runs fn(i) for i in [0, n). With deterministic set, work is split into
// static contiguous chunks; otherwise a shared counter hands out indices
// dynamically. Results must be written to per-index slots by the caller.
inline void parallel_for(int64_t n, int threads, bool deterministic,
                         const std::function<void(int64_t)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int t = static_cast<int>(std::min<int64_t>(threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(t));
  std::exception_ptr error;
  std::mutex error_mu;
  auto guard = [&](int64_t i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  };
  if (deterministic) {
    const int64_t chunk = (n + t - 1) / t;
    for (int k = 0; k < t; ++k) {
      const int64_t lo = k * chunk, hi = std::min<int64_t>(n, lo + chunk);
      pool.emplace_back([&, lo, hi]() {
        for (int64_t i = lo; i < hi; ++i) guard(i);
      });
    }
  } else {
    std::atomic<int64_t> next{0};
    for (int k = 0; k < t; ++k) {
      pool.emplace_back([&]() {
        for (;;) {
          const int64_t i = next.fetch_add(1);
          if (i >= n) return;
          guard(i);
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return;
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace milb
