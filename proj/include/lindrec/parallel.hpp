#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lindrec
{
    inline unsigned default_threads() noexcept
    {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : hw;
    }

    // Calls f(i) for i in [0, n) on up to `threads` workers (0 = all cores).
    // Work is handed out by an atomic counter; f must write only to slots
    // owned by i, so results do not depend on scheduling. The first
    // exception thrown by any f is rethrown after all workers stop.
    template <class F>
    void parallel_for(std::int64_t n, unsigned threads, F&& f)
    {
        if (n <= 0)
        {
            return;
        }
        if (threads == 0)
        {
            threads = default_threads();
        }
        threads = static_cast<unsigned>(std::min<std::int64_t>(threads, n));
        if (threads <= 1)
        {
            for (std::int64_t i = 0; i < n; ++i)
            {
                f(i);
            }
            return;
        }
        std::atomic<std::int64_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&]() {
            for (;;)
            {
                const std::int64_t i = next.fetch_add(1);
                if (i >= n || failed.load())
                {
                    return;
                }
                try
                {
                    f(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                    {
                        error = std::current_exception();
                    }
                    failed.store(true);
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t)
        {
            pool.emplace_back(worker);
        }
        for (auto& t : pool)
        {
            t.join();
        }
        if (error)
        {
            std::rethrow_exception(error);
        }
    }

    // Splits [0, n) into fixed blocks of `block` items so that per-block
    // partial results can be merged in block order.
    struct BlockPlan
    {
        std::int64_t n = 0;
        std::int64_t block = 1;

        std::int64_t blocks() const noexcept { return n <= 0 ? 0 : (n + block - 1) / block; }
        std::int64_t begin(std::int64_t b) const noexcept { return b * block; }
        std::int64_t end(std::int64_t b) const noexcept { return std::min(n, (b + 1) * block); }
    };
}
