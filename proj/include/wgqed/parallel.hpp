// parallel.hpp - deterministic fork/join over index ranges.
//
// Work is split into contiguous chunks; each index is written by exactly one
// task, so results never depend on the thread count.

#pragma once

#include <cstddef>
#include <functional>

namespace wgqed {

/// Thread cap for parallel loops. 0 means "use WGQED_THREADS or hardware".
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Calls body(begin, end) over disjoint chunks covering [0, n).
void parallel_for(std::size_t n, std::size_t min_chunk, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wgqed
