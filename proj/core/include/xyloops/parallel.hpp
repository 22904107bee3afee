#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace xyl {

// Worker count: XYLOOPS_WORKERS if set and positive, else the hardware count.
inline int worker_count() {
    if (const char* s = std::getenv("XYLOOPS_WORKERS")) {
        try {
            int n = std::stoi(s);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [0, n) on a worker pool. Results must be written to
// per-index slots so the outcome does not depend on scheduling. The first
// exception thrown by any job is rethrown here.
template <class F>
void parallel_for(std::size_t n, F&& f, int workers = worker_count()) {
    std::size_t w = std::min<std::size_t>(std::size_t(std::max(workers, 1)), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto run = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace xyl
