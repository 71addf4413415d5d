#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fpp::detail {

// Runs fn(0..nblocks-1) across a worker pool. Blocks are claimed by atomic
// counter; callers keep per-block result slots so merge order stays fixed
// regardless of worker count. The first exception wins and is rethrown.
inline void run_blocks(size_t nblocks, unsigned workers,
                       const std::function<void(size_t)>& fn) {
    unsigned nw = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    if (nw <= 1 || nblocks <= 1) {
        for (size_t i = 0; i < nblocks; ++i) fn(i);
        return;
    }
    if (nw > nblocks) nw = static_cast<unsigned>(nblocks);
    std::atomic<size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned t = 0; t < nw; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= nblocks) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace fpp::detail
