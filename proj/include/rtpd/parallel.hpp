#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace rtpd {

/// Worker count used by all parallel stages. 0 selects hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end, chunk) for each. Chunk boundaries depend only on n and the
/// chunk count, so per-chunk results merged in chunk order are deterministic.
template <typename Body>
void parallel_chunks(std::size_t n, Body&& body) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), n));
  if (workers == 1) {
    if (n > 0) body(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = n * w / workers;
      const std::size_t end = n * (w + 1) / workers;
      pool.emplace_back([&, begin, end, w] {
        try {
          body(begin, end, w);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) body(i);
  });
}

}  // namespace rtpd
