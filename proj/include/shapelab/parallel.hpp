#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace shapelab {

/// Static-chunked parallel loop over [0, n). Each index must write only its
/// own output slot, so results are identical for any worker count. The
/// first worker exception, if any, is rethrown on the caller thread.
template <typename Fn>
void parallel_for(std::int64_t n, int jobs, Fn&& fn) {
    if (n <= 0) return;
    if (jobs <= 1 || n == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = static_cast<int>(std::min<std::int64_t>(jobs, n));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::int64_t lo = n * w / workers;
            const std::int64_t hi = n * (w + 1) / workers;
            try {
                for (std::int64_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Number of hardware threads, at least 1.
inline int default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace shapelab
