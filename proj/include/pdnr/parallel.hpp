#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pdnr {

// Worker cap: PDNR_WORKERS overrides hardware concurrency. Worker count must
// never influence numerical output; it only schedules independent blocks.
inline int default_worker_count() {
    if (const char* env = std::getenv("PDNR_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(block) for block = 0..n_blocks-1 on up to `workers` threads.
// Blocks own disjoint output slots, so scheduling order cannot perturb
// results; reductions over block outputs happen afterwards in block order.
inline void run_blocks(int n_blocks, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n_blocks <= 1) {
        for (int b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int b = next.fetch_add(1);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(workers, n_blocks);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace pdnr
