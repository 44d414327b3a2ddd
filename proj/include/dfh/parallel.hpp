#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace dfh {

// Static chunking over [0, n). Each index is visited by exactly one worker, so
// writes to per-index slots need no synchronization.
template <class F>
void parallel_for(int n, int threads, F&& fn) {
  int w = std::max(1, std::min(threads, n));
  if (w == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(w);
  for (int t = 0; t < w; ++t) {
    int lo = int((long long)n * t / w), hi = int((long long)n * (t + 1) / w);
    pool.emplace_back([&, lo, hi, t] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

}  // namespace dfh
