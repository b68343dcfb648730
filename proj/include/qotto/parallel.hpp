// parallel.hpp: deterministic index-range parallel_for. Results land in
// preallocated slots, so the outcome does not depend on scheduling.

#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qotto {

template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
        pool.emplace_back([&body, w, n_workers, count] {
            for (std::size_t i = w; i < count; i += n_workers) body(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

inline int default_threads() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace qotto
