#pragma once

#include <cstddef>
#include <functional>

namespace optrate {

// Worker count: hardware concurrency capped by OPTRATE_THREADS.
int worker_count();

// Runs body(i) for i in [0, n). Each index writes its own output slot, so
// results do not depend on scheduling. Nested calls run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace optrate
