#pragma once

#include <cstddef>
#include <functional>

namespace artpipe {

/// Worker count: hardware concurrency, capped by ARTPIPE_THREADS when set.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Work items must write to disjoint outputs;
/// if any item throws, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace artpipe
