#pragma once

#include <cstddef>
#include <functional>

namespace dmilp {

// Runs fn(0..count-1) on up to `jobs` threads and joins. The first exception
// thrown by any task is rethrown after all workers finish. jobs <= 1 runs
// inline in index order.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace dmilp
