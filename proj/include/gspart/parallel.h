#pragma once

#include <cstddef>
#include <functional>

namespace gspart {

// Worker count: LOBE_THREADS if set and positive, else hardware concurrency.
int worker_count();

// Runs fn(i) for i in [0, count). Iterations must not share mutable state.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace gspart
