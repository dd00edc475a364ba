/// Deterministic reductions. FWV_THREADS caps the worker count; results are
/// identical for any thread count because chunk sums are combined pairwise in
/// fixed index order.

#pragma once

#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace fwv {

inline unsigned max_threads() {
  if (const char* env = std::getenv("FWV_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Pairwise summation in index order.
inline double pairwise_sum(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  while (xs.size() > 1) {
    std::vector<double> next;
    next.reserve((xs.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(xs[i] + xs[i + 1]);
    if (xs.size() % 2) next.push_back(xs.back());
    xs = std::move(next);
  }
  return xs[0];
}

/// Evaluates fn(chunk) for chunk = 0..chunks-1 (possibly on several threads)
/// and reduces the per-chunk values pairwise in chunk order.
inline double map_reduce_sum(std::size_t chunks, const std::function<double(std::size_t)>& fn) {
  std::vector<double> partial(chunks, 0.0);
  unsigned workers = std::min<std::size_t>(max_threads(), chunks ? chunks : 1);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) partial[c] = fn(c);
  } else {
    std::vector<std::thread> pool;
    std::size_t per = (chunks + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      std::size_t lo = w * per, hi = std::min(chunks, lo + per);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t c = lo; c < hi; ++c) partial[c] = fn(c);
      });
    }
    for (auto& t : pool) t.join();
  }
  return pairwise_sum(std::move(partial));
}

}  // namespace fwv
