#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace reflev {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index writes
// only to its own output slot and draws from its own substream, so the
// result is identical for any worker count; reductions happen afterwards
// in index order.
template <typename Fn>
void parallel_for_index(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nthreads =
        std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            // contiguous static blocks
            const std::size_t lo = n * t / nthreads;
            const std::size_t hi = n * (t + 1) / nthreads;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace reflev
