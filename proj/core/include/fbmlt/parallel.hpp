#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fbmlt {

//! Run fn(i) for every i in [0, n) across `workers` threads.
//!
//! Indices are split into fixed contiguous blocks, fn writes into
//! preallocated per-index slots, and any reduction happens after the join in
//! index order — so results are bit-identical for every worker count.
inline void parallel_for_index(std::size_t n, int workers,
                               const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (std::size_t b = 0; b < w; ++b) {
        const std::size_t lo = b * n / w;
        const std::size_t hi = (b + 1) * n / w;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::scoped_lock lk(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

//! Fixed-shape pairwise summation: the reduction tree depends only on the
//! element count, never on thread scheduling, so sums are reproducible.
inline double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 8) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size());
}

} // namespace fbmlt
