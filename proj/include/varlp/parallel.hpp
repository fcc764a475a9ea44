#pragma once

#include <cstdint>

namespace varlp {

/// Number of worker threads used by the cell-wise loops.
/// 0 (the default) resolves to the VARLP_THREADS environment variable if set,
/// otherwise to std::thread::hardware_concurrency().
int max_threads();
void set_max_threads(int n);

/// Chunk count used to split a loop of length n; stable for fixed
/// (n, max_threads) so that chunked reductions are reproducible.
int chunk_count(std::int64_t n);

namespace detail {
void run_chunked(std::int64_t n, void* ctx, void (*body)(void*, int, std::int64_t, std::int64_t));
}

/// Runs body(chunk, begin, end) over a static partition of [0, n).
/// Chunks are disjoint; the caller owns any cross-chunk reduction order.
template <typename F>
void parallel_chunks(std::int64_t n, F&& body) {
  auto thunk = [](void* ctx, int chunk, std::int64_t b, std::int64_t e) {
    (*static_cast<F*>(ctx))(chunk, b, e);
  };
  detail::run_chunked(n, &body, thunk);
}

/// Runs body(i) for i in [0, n) with static partitioning.
template <typename F>
void parallel_for(std::int64_t n, F&& body) {
  parallel_chunks(n, [&body](int, std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) body(i);
  });
}

}  // namespace varlp
