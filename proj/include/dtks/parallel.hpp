#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace dtks {

// Process-wide worker count for the parallel sections (covariance rows,
// Monte-Carlo replications, candidate-set evaluation). All parallel users
// either write to disjoint slots or combine with exact reductions (max),
// so results do not depend on this setting.
namespace detail {
inline int& thread_count_storage() {
    static int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}
}  // namespace detail

inline int thread_count() { return detail::thread_count_storage(); }
inline void set_thread_count(int n) { detail::thread_count_storage() = n < 1 ? 1 : n; }

// Runs fn(begin, end) over a partition of [0, n). fn must only touch state
// owned by its range.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(thread_count(), 1), n);
    if (workers <= 1) {
        if (n > 0) fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t wi = 0; wi < workers; ++wi) {
        const std::size_t b = wi * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, wi, b, e] {
            try {
                fn(b, e);
            } catch (...) {
                errors[wi] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

}  // namespace dtks
