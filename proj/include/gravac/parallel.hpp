#pragma once

#include <functional>

namespace gravac {

// Index-parallel map over [0, n). Thread count comes from GRAVAC_THREADS
// (default: hardware concurrency). Work items must be independent; callers
// keep outputs per-index so results are deterministic under any schedule.
void parallel_for(int n, const std::function<void(int)>& fn);

int thread_count();

}  // namespace gravac
