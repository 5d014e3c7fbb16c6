#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace zmap {

/// Evaluates fn(i) for i in [0, count) on up to `workers` threads and returns
/// the results in index order. Workers pull indices from a shared counter; the
/// output slot of each index is fixed, so the result does not depend on the
/// worker count. The exception of the lowest failing index is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<R> out(count);
    const auto nthreads = static_cast<std::size_t>(std::clamp<std::size_t>(
        static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(count, 1)));

    if (nthreads == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_index = count;
    std::exception_ptr err;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (i < err_index) {
                    err_index = i;
                    err = std::current_exception();
                }
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
    pool.clear(); // joins

    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace zmap
