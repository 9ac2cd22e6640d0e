#pragma once

#include <cstddef>
#include <functional>

namespace levylab {

// Number of worker threads for path ensembles: LEVYLAB_WORKERS if set and
// positive, otherwise std::thread::hardware_concurrency().
std::size_t worker_count();

// Calls body(i) for i in [0, count) on worker_count() threads. Each index is
// visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception thrown by any
// body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace levylab
