#pragma once

#include <cstddef>
#include <functional>

namespace enstrack {

/// Worker cap: ENSEMBLE_TRACK_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t thread_cap();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// executed exactly once; the first exception thrown is rethrown after all
/// workers finished.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace enstrack
