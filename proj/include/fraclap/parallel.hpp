#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace fraclap {

/// Thread budget from FRACLAP_THREADS, else 1. Parallelism is opt-in.
inline int default_threads() {
    if (const char* env = std::getenv("FRACLAP_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    return 1;
}

/// out[i] = fn(i) for i < n on up to `threads` workers. Each slot is written by exactly
/// one worker, so results do not depend on scheduling. The first exception is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& fn, int threads = default_threads()) {
    std::vector<T> out(n);
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace fraclap
