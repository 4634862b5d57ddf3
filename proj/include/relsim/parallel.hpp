#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace relsim {

// Worker count resolution: explicit request > RELSIM_WORKERS > hardware.
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RELSIM_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

// Splits [0, n) into at most `workers` contiguous chunks and runs them on
// separate threads. Chunk boundaries depend only on n; callers write to
// disjoint slots, so results do not depend on the worker count.
template <class Fn>
inline void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    if (n == 0) return;
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
    if (workers == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(workers);
    std::size_t base = n / workers;
    std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t end = begin + base + (w < extra ? 1 : 0);
        threads.emplace_back([&fn, &errors, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace relsim
