#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hl {

inline constexpr std::size_t kDefaultParallelism = 8;

// Runs fn(i) for i in [0, n) on at most `parallelism` threads. Returns one
// exception_ptr per index (null on success); results are written by fn itself,
// so output order always follows input order.
template <typename Fn>
std::vector<std::exception_ptr> parallel_for(std::size_t n, std::size_t parallelism, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    if (n == 0) return errors;
    std::size_t workers = std::clamp<std::size_t>(parallelism, 1, n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        work();
        return errors;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return errors;
}

// Rethrows the first (lowest index) failure, if any.
inline void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace hl
