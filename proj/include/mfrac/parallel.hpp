#pragma once
#include <cstddef>
#include <thread>
#include <vector>

namespace mfrac {

// Static block partition of [0, n). Each worker owns a disjoint index range and
// writes only to preallocated slots, so results are identical for any thread
// count. No work stealing on purpose: determinism beats load balance here.
template <class Fn>
void parallel_for(std::size_t n, int threads, Fn&& body) {
    if (n == 0) return;
    if (threads < 1) threads = 1;
    std::size_t nt = std::min<std::size_t>(threads, n);
    if (nt == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    std::size_t chunk = n / nt, rem = n % nt, begin = 0;
    for (std::size_t w = 0; w < nt; ++w) {
        std::size_t len = chunk + (w < rem ? 1 : 0);
        pool.emplace_back([begin, len, &body] {
            for (std::size_t i = begin; i < begin + len; ++i) body(i);
        });
        begin += len;
    }
    for (auto& t : pool) t.join();
}

} // namespace mfrac
