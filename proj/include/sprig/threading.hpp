#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace sprig {

// Index-parallel map over [0, n). Each item's work is self-contained, so
// results do not depend on the thread schedule; the first exception is
// rethrown on the calling thread.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& body) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    workers = std::min(workers, n);
    std::atomic<std::size_t> next{ 0 };
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace sprig
