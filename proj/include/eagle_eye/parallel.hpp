#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace eagle_eye {

/**
 * Runs body(i) for every i in [0, count) over at most `threads` workers.
 *
 * Work is split into contiguous static chunks, so each index is processed
 * exactly once by a single thread. Callers only write to per-index storage,
 * which keeps results bit-identical to the sequential run.
 */
template <typename Body>
void parallel_for(int count, int threads, Body&& body)
{
    if (count <= 0) {
        return;
    }
    const int workers = std::clamp(threads, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int first = w * chunk;
        const int last = std::min(count, first + chunk);
        pool.emplace_back([&, w, first, last] {
            try {
                for (int i = first; i < last; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

}  // namespace eagle_eye
