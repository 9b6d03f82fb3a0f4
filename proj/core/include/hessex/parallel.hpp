#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hessex {

/// Worker cap used by parallel_for; 0 means hardware concurrency.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Calls body(begin, end) on disjoint contiguous chunks of [0, count).
/// Chunk boundaries do not depend on the thread count, so reductions done
/// per chunk and combined in chunk order are deterministic. The first
/// exception thrown by any chunk is rethrown.
template <class Body>
void parallel_for_chunks(std::size_t count, std::size_t chunk, Body&& body) {
    if (count == 0) return;
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t chunks = (count + chunk - 1) / chunk;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_limit(), chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c * chunk, std::min(count, (c + 1) * chunk));
        return;
    }
    std::mutex m;
    std::size_t next = 0;
    std::exception_ptr error;
    auto run = [&] {
        for (;;) {
            std::size_t c;
            {
                std::lock_guard lock(m);
                if (next >= chunks || error) return;
                c = next++;
            }
            try {
                body(c * chunk, std::min(count, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard lock(m);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// body(i) for every i in [0, count).
template <class Body>
void parallel_for(std::size_t count, Body&& body, std::size_t chunk = 64) {
    parallel_for_chunks(count, chunk, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) body(i);
    });
}

}  // namespace hessex
