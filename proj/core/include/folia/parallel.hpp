#pragma once

#include <functional>

namespace folia {

/// Thread budget for internal parallelism.  Reads FOLIA_NUM_THREADS once; a
/// value of 1 disables threading, unset falls back to the hardware count.
int max_threads();

/// Runs fn(i) for i in [0, n), splitting the range over the thread budget.
/// Tasks must be independent; results are deterministic because each index
/// owns its output slot.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace folia
