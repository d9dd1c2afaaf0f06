#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace polydyn {

/// Worker count used by all parallel drivers; 0 means hardware concurrency.
inline std::size_t worker_count(std::size_t requested = 0) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, n) on a pool of threads with dynamic scheduling.
/// Results must be written to per-index slots so output order never depends
/// on scheduling. The first exception thrown by any call is rethrown.
template <class Fn>
void parallel_for(std::size_t n, Fn &&fn, std::size_t threads = 0) {
    const std::size_t workers = std::min(worker_count(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace polydyn
