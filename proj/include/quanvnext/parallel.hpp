#pragma once

#include <cstddef>
#include <functional>

namespace quanvnext {

// Upper bound on worker threads used by parallel_for. 0 means hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots and reduce afterwards in index order, so
// the outcome does not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace quanvnext
