#pragma once

// Worker pool helpers with a fixed reduction order.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace phvs {

/// Size of the index blocks every enumeration is cut into. Partial results are
/// combined block by block in index order, so the floating-point reduction
/// tree never depends on the number of workers.
inline constexpr std::uint64_t kChunkSize = 65536;

/// PHVS_THREADS if set to a positive integer, else the hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for every i in [0, count) on up to `threads` workers (0 means
/// worker_count()). The first exception thrown by any call is rethrown.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn);

/// Sums fn(lo, hi) over the fixed chunks of [0, total), in chunk order.
/// T needs a value-initialized zero and operator+=.
template <class T, class Fn>
T deterministic_sum(std::uint64_t total, unsigned threads, Fn&& fn) {
  const std::uint64_t chunks = (total + kChunkSize - 1) / kChunkSize;
  std::vector<T> partial(chunks);
  parallel_for(chunks, threads, [&](std::uint64_t c) {
    const std::uint64_t lo = c * kChunkSize;
    const std::uint64_t hi = lo + kChunkSize < total ? lo + kChunkSize : total;
    partial[c] = fn(lo, hi);
  });
  T result{};
  for (auto& part : partial) result += part;
  return result;
}

}  // namespace phvs
