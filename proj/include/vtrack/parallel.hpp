#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace vtrack {

/// Static row partition over [begin, end). The body must be a pure map
/// (disjoint writes), which keeps results independent of the partition.
inline void parallel_for(int begin, int end, int threads,
                         const std::function<void(int, int)>& body) {
    const int n = end - begin;
    if (n <= 0) return;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || n == 1) {
        body(begin, end);
        return;
    }
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int lo = begin + t * chunk;
        const int hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(body, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace vtrack
