#pragma once

#include <cstddef>
#include <functional>

namespace bridge::harness {

/// Worker count: BRIDGE_THREADS if set to a positive integer, otherwise the
/// hardware concurrency, never more than `tasks` and never less than 1.
std::size_t worker_count(std::size_t tasks);

/// Runs body(i) for i in [0, count) across worker_count(count) threads.
/// Each index runs exactly once; the first exception thrown is rethrown
/// after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace bridge::harness
