#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace kcent {

/// Runs fn(chunk, first, count) over [0, total) split into fixed-size chunks.
/// Chunk boundaries do not depend on `jobs`; callers reduce per-chunk results
/// in chunk order, which keeps output independent of the thread count.
template <class Fn>
void for_each_chunk(std::size_t total, std::size_t chunk_size, unsigned jobs, Fn&& fn) {
  if (total == 0) return;
  chunk_size = std::max<std::size_t>(1, chunk_size);
  const std::size_t chunks = (total + chunk_size - 1) / chunk_size;
  auto run = [&](std::size_t c) {
    const std::size_t first = c * chunk_size;
    fn(c, first, std::min(chunk_size, total - first));
  };
  if (jobs <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(jobs, chunks));
  for (unsigned t = 0; t < count; ++t) {
    workers.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) {
        try {
          run(c);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

inline std::size_t chunk_count(std::size_t total, std::size_t chunk_size) {
  chunk_size = std::max<std::size_t>(1, chunk_size);
  return (total + chunk_size - 1) / chunk_size;
}

}  // namespace kcent
