#ifndef NERNST_PARALLEL_HPP
#define NERNST_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nernst {

/// Number of workers used when the caller passes 0.
inline unsigned default_workers()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Runs body(i) for i in [0, n) on up to `workers` threads. Indices are handed
 * out dynamically; callers write results into slot i so the outcome does not
 * depend on scheduling. The first exception thrown by any body is rethrown.
 */
template <typename Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body)
{
    if (workers == 0)
        workers = default_workers();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(run);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace nernst

#endif // NERNST_PARALLEL_HPP
