#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace unhap {

/// Runs job(k) for k in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Results keep index order regardless of completion order;
/// the first exception by index is rethrown after all workers finish.
template <typename R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& job, unsigned workers = 0) {
    std::vector<R> results(n);
    std::vector<std::exception_ptr> errors(n);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                results[k] = job(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

}  // namespace unhap
