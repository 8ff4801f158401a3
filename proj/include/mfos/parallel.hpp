#ifndef MFOS_PARALLEL_HPP
#define MFOS_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace mfos {

inline unsigned worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Static block partition of [0, n). Each index is processed exactly once and
// writes only to its own output slot, so results do not depend on the number
// of workers. Reductions over the outputs must be done by the caller in index
// order.
inline void parallel_for(size_t n, const std::function<void(size_t)>& body,
                         unsigned workers = worker_count()) {
  if (n == 0) return;
  if (workers <= 1 || n == 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  if (workers > n) workers = static_cast<unsigned>(n);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const size_t chunk = (n + workers - 1) / workers;
  auto run = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi && i < n; ++i) body(i);
  };
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w * chunk, (w + 1) * chunk);
  run(0, chunk);
  for (auto& t : pool) t.join();
}

}  // namespace mfos

#endif
