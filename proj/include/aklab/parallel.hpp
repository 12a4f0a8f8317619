#pragma once

#include <cstddef>
#include <functional>

namespace aklab {

// Worker count: AKLAB_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs body(i) for i in [0, n) split into contiguous chunks. Each index is
// visited exactly once, so results written per index do not depend on the
// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace aklab
