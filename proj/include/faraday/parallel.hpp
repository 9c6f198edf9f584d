#pragma once

#include <functional>

namespace faraday {

/// Process-wide worker cap used when callers pass threads = 0. Defaults to hardware concurrency.
void set_default_threads(int threads);
int default_threads();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means the default cap).
/// Indices are handed out dynamically; the first exception thrown by any worker is rethrown.
void parallel_for(int count, const std::function<void(int)>& body, int threads = 0);

}  // namespace faraday
