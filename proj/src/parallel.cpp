#include "dwloa/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dwloa::parallel {

namespace {
std::atomic<unsigned> g_default_jobs{0};
}

void set_default_jobs(unsigned jobs) { g_default_jobs.store(jobs); }

unsigned default_jobs() {
    unsigned j = g_default_jobs.load();
    if (j == 0) j = std::max(1u, std::thread::hardware_concurrency());
    return j;
}

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body,
                    unsigned jobs) {
    if (n == 0) return;
    if (jobs == 0) jobs = default_jobs();
    const std::size_t workers = std::min<std::size_t>(jobs, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace dwloa::parallel
