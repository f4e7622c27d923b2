#include "omnisynth/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace omnisynth {

int resolve_workers(int requested) {
  if (requested > 0) return std::min(requested, 256);
  if (const char* env = std::getenv("OMNISYNTH_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return std::min(n, 256);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(std::min(hw, 64u));
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = int(int64_t(n) * w / workers);
    const int hi = int(int64_t(n) * (w + 1) / workers);
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace omnisynth
