#pragma once

// Static-chunk parallel loop.  Work items are independent and write to disjoint
// outputs, so results do not depend on the thread count.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace stable_forms {

/// Thread budget: STABLE_FORMS_THREADS if set (≥ 1), else the hardware concurrency.
inline int thread_count() {
  if (const char* env = std::getenv("STABLE_FORMS_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(int n, F&& body) {
  const int threads = std::min(thread_count(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const int begin = static_cast<int>(static_cast<long long>(n) * t / threads);
    const int end = static_cast<int>(static_cast<long long>(n) * (t + 1) / threads);
    pool.emplace_back([&body, &errors, t, begin, end] {
      try {
        for (int i = begin; i < end; ++i) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  // Rethrow the error of the lowest chunk, which is what a serial loop would have hit first.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace stable_forms
