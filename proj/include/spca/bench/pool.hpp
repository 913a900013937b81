#pragma once

// Fixed-size worker pool over an index range. Results land in index order,
// so the output does not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spca::bench {

/// Worker count: SPCA_WORKERS when set and positive, otherwise `requested` (min 1).
inline int resolve_workers(int requested) {
  if (const char* env = std::getenv("SPCA_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return std::max(requested, 1);
}

/// out[i] = fn(i) for i in [0, count); the first exception thrown by fn is rethrown.
template <class Result, class Fn>
std::vector<Result> parallel_map(std::size_t count, int workers, Fn fn) {
  std::vector<Result> out(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto nthreads = static_cast<std::size_t>(std::max(1, workers));
  if (nthreads == 1 || count < 2) {
    work();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < std::min(nthreads, count); ++t) threads.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace spca::bench
