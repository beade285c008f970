#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace symito {

/// Deterministic parallel map over seed indices: fn(index, seed) runs on a
/// worker pool, results land in a vector slot fixed by the index, and any
/// reduction downstream consumes them in index order, so aggregates cannot
/// depend on scheduling.
template <class T, class Fn>
std::vector<T> map_seeds(int n, std::uint64_t seed_base, int threads, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  if (n == 0) return out;
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads)
                            : std::thread::hardware_concurrency();
  hw = std::max(1u, std::min<unsigned>(hw, static_cast<unsigned>(n)));
  if (hw == 1) {
    for (int i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] =
          fn(i, seed_base + static_cast<std::uint64_t>(i));
    return out;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      out[static_cast<std::size_t>(i)] =
          fn(i, seed_base + static_cast<std::uint64_t>(i));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(hw);
  for (unsigned w = 0; w < hw; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace symito
