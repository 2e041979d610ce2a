#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cbo {

/// Calls fn(k) for k in [0, count) on up to `jobs` threads, in contiguous
/// blocks. fn must only write to slot k of its outputs; the first exception
/// (by block order) is rethrown after all threads join.
template <typename Fn>
void parallel_for_index(std::size_t count, unsigned jobs, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(jobs, count));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t block = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            const std::size_t begin = w * block;
            const std::size_t end = std::min(count, begin + block);
            try {
                for (std::size_t k = begin; k < end; ++k) fn(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace cbo
