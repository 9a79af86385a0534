#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace recurlab {

inline unsigned default_workers() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

/// Runs fn(begin, end, chunk_index) over a contiguous partition of [0, n).
/// Chunks are indexable, so callers merge results in chunk order and stay
/// deterministic regardless of scheduling.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        if (n > 0) fn(std::size_t{0}, n, std::size_t{0});
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (unsigned c = 0; c < workers; ++c) {
        std::size_t len = base + (c < extra ? 1 : 0);
        std::size_t end = begin + len;
        threads.emplace_back([&fn, begin, end, c] { fn(begin, end, std::size_t{c}); });
        begin = end;
    }
    for (auto& t : threads) t.join();
}

} // namespace recurlab
