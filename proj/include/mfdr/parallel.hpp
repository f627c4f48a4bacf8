#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mfdr {

// Runs fn(i) for i in [0, n).  Work is claimed from a shared atomic counter,
// so the assignment of tasks to threads is schedule-dependent -- callers must
// write task i's output to a slot addressed by i and reduce in index order
// afterwards; that keeps results identical for any thread count.
inline void parallel_for(int n, int n_threads,
                         const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (n_threads < 1) n_threads = 1;
  if (n_threads == 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  int next = 0;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      int i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n || first_error) return;
        i = next++;
      }
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(n_threads, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Thread count for parallel sections: MFDR_THREADS if set and valid,
// otherwise the hardware concurrency.
inline int default_thread_count() {
  if (const char* env = std::getenv("MFDR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

}  // namespace mfdr
