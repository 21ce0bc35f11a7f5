#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace proplab {

// Worker count for parallel loops. 0 means hardware concurrency. The
// PROPLAB_THREADS environment variable is read once if this is never called.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(begin, end) over [0, n) split into fixed chunks. Chunk layout
// depends only on n, so per-chunk partial results combined in chunk order
// give the same bits for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

struct ChunkPlan {
  std::size_t n;
  std::size_t chunk;
  std::size_t count() const { return chunk == 0 ? 0 : (n + chunk - 1) / chunk; }
};
ChunkPlan chunk_plan(std::size_t n);

// Deterministic sum: per-chunk partials, added in chunk order.
template <typename T, typename F>
T parallel_sum(std::size_t n, F term) {
  const ChunkPlan plan = chunk_plan(n);
  std::vector<T> partial(plan.count(), T{});
  parallel_for(plan.count(), [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      T acc{};
      const std::size_t lo = c * plan.chunk, hi = std::min(n, lo + plan.chunk);
      for (std::size_t i = lo; i < hi; ++i) acc += term(i);
      partial[c] = acc;
    }
  });
  T total{};
  for (const T& v : partial) total += v;
  return total;
}

}  // namespace proplab
