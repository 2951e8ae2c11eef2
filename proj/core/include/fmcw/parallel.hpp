#pragma once

#include <cstddef>
#include <functional>

namespace fmcw {

/// Worker count from FMCW_MEND_WORKERS, else 1.
std::size_t default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// visited exactly once; callers write results into slot i so aggregation
/// order never depends on scheduling. The first exception is rethrown after
/// all workers have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace fmcw
