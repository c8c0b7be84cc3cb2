#include "oim/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace oim {

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int threads) {
    g_thread_cap = threads;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (g_thread_cap > 0) return g_thread_cap;
    if (const char* env = std::getenv("OPINION_IM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_chunks(std::int64_t count,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn,
                     int threads) {
    if (count <= 0) return;
    int workers = resolve_threads(threads);
    int chunks = kParallelChunks;
    if (count < chunks) chunks = static_cast<int>(count);
    if (workers > chunks) workers = chunks;

    auto run_chunk = [&](int c) {
        std::int64_t begin = count * c / chunks;
        std::int64_t end = count * (c + 1) / chunks;
        fn(c, begin, end);
    };

    if (workers <= 1) {
        for (int c = 0; c < chunks; ++c) run_chunk(c);
        return;
    }

    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int c = next.fetch_add(1, std::memory_order_relaxed);
                if (c >= chunks) return;
                run_chunk(c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace oim
