#pragma once

#include <cstddef>
#include <functional>

namespace oobball {

// 0 or negative means one worker per hardware thread.
int resolve_threads(int requested);

// Calls body(i) for every i in [0, n) using up to `threads` workers that claim indices
// dynamically. Results must be written to slots owned by i so that scheduling cannot affect
// them. The first exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace oobball
