#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lamsmooth {

// Worker count from LAMIN_SMOOTH_WORKERS if set, else `requested`, at least 1.
inline int resolve_workers(int requested) {
  if (const char* env = std::getenv("LAMIN_SMOOTH_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (...) {
    }
  }
  return std::max(1, requested);
}

// Calls fn(i) for i in [0, n) on up to `workers` threads. Index blocks are
// claimed dynamically; callers write results into slot i and reduce in
// index order afterwards, so results do not depend on scheduling. The first
// exception is rethrown after all threads join.
template <class Fn>
void parallel_for(std::size_t n, int workers, const Fn& fn) {
  const auto w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  const std::size_t block = std::max<std::size_t>(1, n / (w * 8));
  auto body = [&] {
    for (;;) {
      const std::size_t start = next.fetch_add(block);
      if (start >= n) return;
      const std::size_t stop = std::min(n, start + block);
      try {
        for (std::size_t i = start; i < stop; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!err) err = std::current_exception();
        next = n;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(w, n); ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace lamsmooth
