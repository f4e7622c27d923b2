#pragma once

#include <functional>

namespace omnisynth {

// Resolves the worker count: explicit request > OMNISYNTH_WORKERS env var >
// hardware concurrency. Always >= 1.
int resolve_workers(int requested = 0);

// Runs fn(i) for i in [0, n) split into contiguous static chunks, one per
// worker. The static split keeps outputs bit-identical for any worker count
// as long as fn writes disjoint locations.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace omnisynth
