#pragma once

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace ncsg {

// Worker count: NCSG_THREADS if set (>=1), otherwise hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv("NCSG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1u;
}

// Static block-partitioned parallel loop over [0, n).
//
// Contract: body(i) must write only to slot i of preallocated output --
// no shared mutable state -- so the result is bitwise identical for any
// thread count. Reductions are done afterwards with pairwise_sum.
// A throwing body aborts the loop; one of the thrown exceptions is
// rethrown on the calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const unsigned workers = thread_count();
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t nt = std::min<std::size_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(nt);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::atomic_flag error_claimed = ATOMIC_FLAG_INIT;
  for (std::size_t t = 0; t < nt; ++t) {
    const std::size_t lo = n * t / nt;
    const std::size_t hi = n * (t + 1) / nt;
    pool.emplace_back([lo, hi, &body, &error, &failed, &error_claimed] {
      try {
        for (std::size_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i) {
          body(i);
        }
      } catch (...) {
        if (!error_claimed.test_and_set()) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ncsg
