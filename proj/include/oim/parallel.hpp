#pragma once

#include <cstdint>
#include <functional>

namespace oim {

// Worker count used when a caller passes threads == 0. Resolution order:
// set_thread_cap() (the --threads flag), then the OPINION_IM_THREADS
// environment variable, then std::thread::hardware_concurrency().
int resolve_threads(int requested);
void set_thread_cap(int threads);

// Runs fn(begin, end) over contiguous chunks of [0, count). Work is split
// into a fixed number of chunks independent of the worker count, so code
// that accumulates per-chunk results and combines them in chunk order stays
// deterministic no matter how many threads execute.
void parallel_chunks(std::int64_t count,
                     const std::function<void(int chunk, std::int64_t begin, std::int64_t end)>& fn,
                     int threads = 0);

inline constexpr int kParallelChunks = 128;

} // namespace oim
