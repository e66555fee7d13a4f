#pragma once

#include <cstddef>
#include <functional>

namespace floquet {

/// Worker count for parameter sweeps: hardware concurrency, capped by the
/// FLOQUET_THREADS environment variable when set.
int worker_count();

/// Runs body(i) for i in [0, n). Work items must be independent; callers get
/// deterministic results by writing into preallocated slots indexed by i.
/// Exceptions from body propagate to the caller (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace floquet
