#pragma once

#include <cstddef>
#include <functional>

namespace spectra_lab {

/// Worker count: SPECTRA_LAB_THREADS if set to a positive integer, else the
/// number of hardware threads (at least 1).
std::size_t thread_budget();

/// Runs fn(0) .. fn(count - 1) on up to `threads` workers. Each index is run
/// exactly once; the exception of the lowest failing index is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace spectra_lab
