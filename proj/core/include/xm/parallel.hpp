#pragma once

#include <functional>

namespace xm {

// Runs fn(i) for i in [0, n) across `workers` threads. Work is split into
// contiguous index ranges and fn may only write state owned by index i, so
// the result is identical for every worker count. workers <= 1 runs inline.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace xm
