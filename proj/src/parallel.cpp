#include "varlp/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace varlp {

namespace {
std::atomic<int> g_max_threads{0};

int resolve_default() {
  if (const char* env = std::getenv("VARLP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}
}  // namespace

int max_threads() {
  const int n = g_max_threads.load(std::memory_order_relaxed);
  return n > 0 ? n : resolve_default();
}

void set_max_threads(int n) { g_max_threads.store(n > 0 ? n : 0, std::memory_order_relaxed); }

int chunk_count(std::int64_t n) {
  if (n <= 0) return 0;
  return static_cast<int>(std::min<std::int64_t>(max_threads(), n));
}

namespace detail {

void run_chunked(std::int64_t n, void* ctx, void (*body)(void*, int, std::int64_t, std::int64_t)) {
  const int chunks = chunk_count(n);
  if (chunks <= 0) return;
  if (chunks == 1) {
    body(ctx, 0, 0, n);
    return;
  }
  const std::int64_t per = (n + chunks - 1) / chunks;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks) - 1);
  for (int c = 1; c < chunks; ++c) {
    const std::int64_t b = std::min<std::int64_t>(c * per, n);
    const std::int64_t e = std::min<std::int64_t>(b + per, n);
    pool.emplace_back([=] { body(ctx, c, b, e); });
  }
  body(ctx, 0, 0, std::min<std::int64_t>(per, n));
  for (auto& t : pool) t.join();
}

}  // namespace detail
}  // namespace varlp
