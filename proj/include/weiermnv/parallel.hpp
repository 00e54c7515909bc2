#pragma once

#include <functional>

namespace wmnv {

/// Worker count: `requested` if positive, else WEIER_MNV_THREADS, else the
/// hardware concurrency (at least 1).
int thread_count(int requested = 0);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions from the
/// body are rethrown on the calling thread (the first one wins).
void parallel_for(int n, const std::function<void(int)> &body, int threads = 0);

} // namespace wmnv
