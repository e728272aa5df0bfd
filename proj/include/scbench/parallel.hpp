#ifndef SCBENCH_PARALLEL_HPP
#define SCBENCH_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

/**
 * @file parallel.hpp
 * @brief Static-partition parallel loops.
 *
 * Work is split into contiguous index ranges and every output slot is written by exactly one worker,
 * so callers that reduce per-range results in index order get results that do not depend on the thread count.
 */

namespace scbench {

/**
 * Number of worker threads used by `parallel_for()`.
 * Taken from the `SCBENCH_THREADS` environment variable unless overridden with `set_thread_count()`;
 * falls back to the hardware concurrency.
 */
int thread_count();

/**
 * Override the worker thread count for this process; pass 0 to go back to the environment value.
 */
void set_thread_count(int n);

/**
 * Run `fn(begin, end)` over `[0, n)` split into at most `thread_count()` contiguous ranges.
 * Exceptions thrown by a worker are rethrown on the calling thread.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}

#endif
