#pragma once

#include <cstddef>
#include <functional>

namespace geoknit {

/// Worker count: hardware concurrency, capped by GEOKNIT_THREADS when set.
unsigned worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Work items
/// must write to disjoint outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace geoknit
