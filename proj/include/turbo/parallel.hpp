#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace turbo {

/// Worker count from TURBO_WORKERS, else the hardware concurrency.
inline unsigned default_workers()
{
    if (const char* env = std::getenv("TURBO_WORKERS")) {
        try {
            const long n = std::stol(env);
            if (n > 0)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(index, worker) for every index in [begin, end). Each worker id is
/// used by one thread only, so callers can keep per-worker scratch state.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, Fn&& fn)
{
    if (end <= begin)
        return;
    const std::size_t count = end - begin;
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
    if (threads == 1) {
        for (std::size_t i = begin; i < end; ++i)
            fn(i, 0u);
        return;
    }

    std::atomic<std::size_t> next{begin};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](unsigned worker) {
        try {
            for (std::size_t i = next++; i < end; i = next++)
                fn(i, worker);
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error)
                error = std::current_exception();
            next = end;
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back(body, w);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace turbo
