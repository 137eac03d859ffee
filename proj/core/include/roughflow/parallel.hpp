#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace roughflow {

/// Thread count from ZL_THREADS (unset or invalid: OpenMP default).
int configured_threads();
/// Applies configured_threads() to the OpenMP runtime.
void apply_thread_config();

/// Runs body(i) for i in [0, n) over OpenMP threads. Every index writes to
/// its own slot, so results do not depend on the schedule. The first
/// exception thrown by any index is rethrown after the loop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace roughflow
