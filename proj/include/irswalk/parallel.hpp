#pragma once

// Deterministic worker pool: replicates are split into a fixed chunk grid
// (independent of the thread count) and every random stream is keyed by
// replicate index, so any --threads value reproduces the same numbers.

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace irswalk {

struct ChunkRange {
  std::int64_t begin;
  std::int64_t end;
};

inline std::vector<ChunkRange> chunk_grid(std::int64_t n, int chunks = 64) {
  std::vector<ChunkRange> out;
  if (n <= 0) return out;
  const std::int64_t per = (n + chunks - 1) / chunks;
  for (std::int64_t b = 0; b < n; b += per) out.push_back({b, std::min(n, b + per)});
  return out;
}

// fn(range) -> State; states come back in grid order for stable merging.
template <class State, class Fn>
std::vector<State> run_chunked(std::int64_t n, int threads, Fn&& fn, int chunks = 64) {
  const auto grid = chunk_grid(n, chunks);
  std::vector<State> results(grid.size());
  if (threads <= 1 || grid.size() <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) results[i] = fn(grid[i]);
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      results[i] = fn(grid[i]);
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min<int>(threads, static_cast<int>(grid.size()));
  pool.reserve(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace irswalk
