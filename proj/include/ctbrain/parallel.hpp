#ifndef CTBRAIN_PARALLEL_HPP
#define CTBRAIN_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ctbrain {

/// Worker count for a request; 0 means one per hardware thread.
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

/*
 * Runs fn(i) for every i in [begin, end) using static contiguous chunks.
 * Callers only write to disjoint outputs per index, so results do not
 * depend on the worker count. The first exception thrown by any worker is
 * rethrown on the calling thread.
 */
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t workers = std::min<std::size_t>(resolve_threads(threads), n);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = n / workers;
  const std::size_t extra = n % workers;
  std::size_t start = begin;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t stop = start + chunk + (w < extra ? 1 : 0);
    pool.emplace_back([&, start, stop] {
      try {
        for (std::size_t i = start; i < stop; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
    start = stop;
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace ctbrain

#endif
