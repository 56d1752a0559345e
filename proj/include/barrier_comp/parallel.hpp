#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace barrier_comp {

inline unsigned thread_budget() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("BARRIER_COMP_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return n;
}

// Static block partition of [0, count); body must be safe to call from
// multiple threads with disjoint indices.
inline void parallel_for(size_t count, const std::function<void(size_t)>& body) {
    const unsigned threads = thread_budget();
    if (threads <= 1 || count < 2 * threads) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const size_t lo = t * chunk;
        const size_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace barrier_comp
