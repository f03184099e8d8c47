#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hyplateau::detail {

// Runs body(begin, end, chunk) over `threads` contiguous chunks of [0, count).
// Chunk boundaries depend only on (count, threads), so chunk-local results merged
// in chunk order are independent of scheduling.
template <class Body>
void parallel_chunks(std::size_t count, int threads, Body&& body) {
    const std::size_t t = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
    if (t == 1) {
        body(std::size_t{0}, count, std::size_t{0});
        return;
    }
    std::vector<std::exception_ptr> errors(t);
    {
        std::vector<std::jthread> pool;
        pool.reserve(t);
        for (std::size_t c = 0; c < t; ++c) {
            const std::size_t begin = count * c / t, end = count * (c + 1) / t;
            pool.emplace_back([&, begin, end, c] {
                try {
                    body(begin, end, c);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline std::size_t chunk_count(std::size_t count, int threads) {
    return std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
}

}  // namespace hyplateau::detail
