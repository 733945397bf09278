#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace ddradar {

/// Worker count for the row-parallel kernels. 1 runs inline on the caller.
struct Execution {
    unsigned threads = 1;
};

namespace detail {

// Splits [begin, end) into contiguous blocks, one per worker. Each index is
// visited exactly once and workers never share output slots, so results do
// not depend on the thread count.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, const Execution& exec, Fn&& fn) {
    const std::int64_t count = end - begin;
    if (count <= 0) {
        return;
    }
    const auto workers = static_cast<std::int64_t>(
        std::clamp<std::int64_t>(exec.threads, 1, count));
    if (workers == 1) {
        for (std::int64_t i = begin; i < end; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t block = (count + workers - 1) / workers;
    for (std::int64_t w = 0; w < workers; ++w) {
        const std::int64_t lo = begin + w * block;
        const std::int64_t hi = std::min(end, lo + block);
        if (lo >= hi) {
            break;
        }
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) {
                fn(i);
            }
        });
    }
}

}  // namespace detail
}  // namespace ddradar
