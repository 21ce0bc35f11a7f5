#include "proplab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace proplab {

namespace {

std::atomic<unsigned> g_threads{0};
std::atomic<bool> g_set{false};

unsigned resolve(unsigned n) {
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace

void set_thread_count(unsigned n) {
  g_threads = resolve(n);
  g_set = true;
}

unsigned thread_count() {
  if (!g_set) {
    unsigned n = 0;
    if (const char* env = std::getenv("PROPLAB_THREADS")) {
      try {
        n = static_cast<unsigned>(std::stoul(env));
      } catch (...) {
        n = 0;
      }
    }
    set_thread_count(n);
  }
  return g_threads;
}

ChunkPlan chunk_plan(std::size_t n) {
  // 256 chunks at most, whatever the thread count
  const std::size_t chunk = std::max<std::size_t>(1, (n + 255) / 256);
  return {n, chunk};
}

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  const unsigned t = std::min<std::size_t>(thread_count(), n);
  if (t <= 1) {
    body(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::exception_ptr first;
  std::mutex mu;
  const std::size_t step = (n + t - 1) / t;
  for (unsigned k = 0; k < t; ++k) {
    const std::size_t b = k * step, e = std::min(n, b + step);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace proplab
