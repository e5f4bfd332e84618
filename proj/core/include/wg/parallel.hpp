#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace wg {

// Runs fn(i) for i in [0, n) across up to nthreads workers in fixed
// contiguous chunks. Each index is visited exactly once; fn must only write
// to its own slot of any shared output. nthreads <= 0 uses the hardware
// count. Results are independent of the thread count because no cross-index
// reduction happens here.
inline void parallel_for(int n, int nthreads,
                         const std::function<void(int)>& fn) {
  if (nthreads <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    nthreads = hw ? static_cast<int>(hw) : 1;
  }
  nthreads = std::min(nthreads, n);
  if (nthreads <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  const int chunk = (n + nthreads - 1) / nthreads;
  for (int w = 0; w < nthreads; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::thread& t : workers) t.join();
}

}  // namespace wg
