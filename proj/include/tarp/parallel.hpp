#pragma once

// Bounded worker pool for index-parallel maps. Each task writes only its own
// output slot, so results do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace tarp {

/// 0 means "one per hardware thread".
inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs task(i) for i in [0, count). If any task throws, remaining tasks are
/// skipped and the exception of the lowest failing index is returned (null if none).
inline std::exception_ptr parallel_for(std::size_t count, unsigned workers,
                                       const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || stop.load()) return;
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
                stop.store(true);
            }
        }
    };
    const unsigned nThreads = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), count));
    if (nThreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nThreads);
        for (unsigned t = 0; t < nThreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) return e;
    return nullptr;
}

}  // namespace tarp
