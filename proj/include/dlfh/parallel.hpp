#ifndef DLFH_PARALLEL_HPP
#define DLFH_PARALLEL_HPP

#include <thread>
#include <vector>

#include "dlfh/common.hpp"

namespace dlfh {

// Runs fn(i) for i in [0, total) split into contiguous chunks, one worker
// thread per chunk. Each task writes only to its own output slot, so results
// are identical for every thread count; callers reduce afterwards in a fixed
// order.
template <typename Fn>
void parallel_for(Index total, int threads, Fn &&fn) {
    if (threads < 1) threads = 1;
    if (threads == 1 || total <= 1) {
        for (Index i = 0; i < total; ++i) fn(i);
        return;
    }
    const Index nchunks = std::min<Index>(threads, total);
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(nchunks));
    for (Index chunk = 0; chunk < nchunks; ++chunk) {
        const Index begin = total * chunk / nchunks;
        const Index end = total * (chunk + 1) / nchunks;
        workers.emplace_back([begin, end, &fn] {
            for (Index i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto &w : workers) w.join();
}

// Sum of values[begin, end) by recursive pairwise halving; the reduction tree
// depends only on the range, not on thread count.
inline double pairwise_sum(const std::vector<double> &values, std::size_t begin,
                           std::size_t end) {
    const std::size_t len = end - begin;
    if (len == 0) return 0.0;
    if (len == 1) return values[begin];
    const std::size_t mid = begin + len / 2;
    return pairwise_sum(values, begin, mid) + pairwise_sum(values, mid, end);
}

inline double pairwise_sum(const std::vector<double> &values) {
    return pairwise_sum(values, 0, values.size());
}

}  // namespace dlfh

#endif  // DLFH_PARALLEL_HPP
