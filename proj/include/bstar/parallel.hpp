#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace bstar {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs fn(i) for i in [0, count) over contiguous chunks. Callers write results
// into their own per-index slots, so the outcome is independent of scheduling.
// If workers throw, the exception raised at the lowest index is rethrown here.
template <typename Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::pair<int, std::exception_ptr>> errors(threads, {-1, nullptr});
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const int base = count / threads;
  const int rem = count % threads;
  int start = 0;
  for (int w = 0; w < threads; ++w) {
    const int lo = start;
    const int hi = lo + base + (w < rem ? 1 : 0);
    start = hi;
    pool.emplace_back([&fn, &errors, w, lo, hi] {
      for (int i = lo; i < hi; ++i) {
        try {
          fn(i);
        } catch (...) {
          errors[w] = {i, std::current_exception()};
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  const std::exception_ptr* first = nullptr;
  int first_index = -1;
  for (const auto& [index, err] : errors) {
    if (err && (first_index < 0 || index < first_index)) {
      first_index = index;
      first = &err;
    }
  }
  if (first) std::rethrow_exception(*first);
}

}  // namespace bstar
