#pragma once

#include <cstddef>
#include <functional>

namespace lueders {

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Indices are handed out dynamically; callers write results
/// into slot i, so output order never depends on scheduling. The exception from
/// the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

std::size_t default_thread_count();

}  // namespace lueders
