#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace sceptre {

// Splits [0, n) into `workers` contiguous chunks and runs fn(chunk, begin, end)
// on each. Chunk boundaries depend only on (n, workers), so reductions that
// combine per-chunk results in chunk order are deterministic. The first
// exception thrown by any chunk is rethrown on the calling thread.
template <typename Fn>
void parallel_chunks(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n == 0 ? 1 : n));
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  const std::size_t step = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    for (std::size_t c = 1; c < workers; ++c) {
      const std::size_t begin = std::min(n, c * step);
      const std::size_t end = std::min(n, begin + step);
      threads.emplace_back([&fn, &errors, c, begin, end] {
        try {
          fn(c, begin, end);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    try {
      fn(std::size_t{0}, std::size_t{0}, std::min(n, step));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Number of chunks parallel_chunks will use.
inline std::size_t chunk_count(std::size_t n, std::size_t workers) {
  return std::max<std::size_t>(1, std::min(workers, n == 0 ? 1 : n));
}

}  // namespace sceptre
