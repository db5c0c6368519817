#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sbm {

/// Worker count: `requested` if positive, otherwise the hardware concurrency.
inline unsigned worker_count(unsigned requested = 0) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n) on a small thread pool. Work items are
/// claimed dynamically; callers store results per index and reduce in index
/// order afterwards, which keeps results independent of scheduling.
/// The first exception thrown by any body is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned threads = 0) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace sbm
