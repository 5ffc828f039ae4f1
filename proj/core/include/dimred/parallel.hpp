#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dimred {

/// Runs body(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). Indices are split into contiguous blocks; callers write into
/// per-index slots so the result never depends on the worker count.
template <class Body>
void parallel_for(std::size_t count, unsigned workers, Body&& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t threads = std::min<std::size_t>(workers, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = count * t / threads;
        const std::size_t end = count * (t + 1) / threads;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    pool.clear();  // joins
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dimred
