#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace calbench {

/// Global cap on worker threads (CLI --threads). 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs fn(i) for i in [0, n). Results must be written to index-addressed
/// slots by the caller so that the outcome is independent of scheduling.
/// Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

inline std::atomic<unsigned>& detail_thread_cap() {
    static std::atomic<unsigned> cap{0};
    return cap;
}

inline void set_max_threads(unsigned n) { detail_thread_cap().store(n); }

inline unsigned max_threads() {
    unsigned n = detail_thread_cap().load();
    if (n == 0) n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                         unsigned threads) {
    if (n == 0) return;
    unsigned t = threads == 0 ? max_threads() : threads;
    if (t > n) t = static_cast<unsigned>(n);
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(t);
    workers.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= n) break;
                    fn(i);
                }
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(n);  // stop other workers early
            }
        });
    }
    for (auto& th : workers) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace calbench
