#pragma once

#include <cstddef>
#include <functional>

namespace awgif {

// Worker count used by the row-parallel kernels. Defaults to the AWGIF_THREADS
// environment variable, else the hardware concurrency. Results never depend on it.
int thread_count();
void set_thread_count(int threads);

/**
 * Runs body(begin, end) over contiguous chunks of [0, n). Small ranges
 * (fewer than `min_chunk` items per worker) run inline on the caller.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 16);

} // namespace awgif
