#pragma once

#include <cstddef>
#include <functional>

namespace malab {

/// Worker count: MA_LAB_THREADS if set (>= 1), else the hardware concurrency.
int thread_count();
/// Overrides the worker count for the current process (0 restores the default).
void set_thread_count(int n);

/// Runs body(begin, end) over fixed chunks of [0, n). Chunk boundaries depend only
/// on n and `grain`, never on the worker count, so per-chunk reductions combined in
/// chunk order are bit-identical for every thread count.
void parallel_chunks(std::size_t n, std::size_t grain,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

std::size_t chunk_count(std::size_t n, std::size_t grain);

}  // namespace malab
