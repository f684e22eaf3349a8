#pragma once

#include <cstddef>
#include <functional>

namespace renyi
{

// Worker count: RENYI_MIX_THREADS if set and positive, otherwise the hardware
// concurrency (at least 1).
unsigned thread_count();

// Calls body(k) for k in [0, count) on up to thread_count() threads. Bodies must
// write only to slots owned by k; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)> &body);

} // namespace renyi
