#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace morsegap {

// Calls fn(i) for i in [0, n) on up to `workers` threads with static chunks.
// fn must write only to its own slot; callers reduce sequentially afterwards,
// which keeps results independent of the worker count.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * n / w; i < (t + 1) * n / w; ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Fixed-shape pairwise sum: the tree depends only on the length.
inline double tree_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return x[0];
  const std::size_t h = n / 2;
  return tree_sum(x, h) + tree_sum(x + h, n - h);
}

inline double tree_sum(const std::vector<double>& x) { return tree_sum(x.data(), x.size()); }

} // namespace morsegap
