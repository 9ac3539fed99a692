#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace scalestat {

/// Runs fn(i) for i in [0, count) on up to `threads` worker threads.
///
/// Tasks pull indices from a shared counter, so the assignment of indices to
/// threads is schedule-dependent -- callers must make each fn(i) depend only
/// on i (e.g. write into slot i of a preallocated vector and draw randomness
/// from a per-index child stream). Exceptions are captured per index and the
/// lowest-index one is rethrown after all workers join, so failure behavior
/// is schedule-independent too.
template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
    if (count == 0) return;
    if (threads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace scalestat
