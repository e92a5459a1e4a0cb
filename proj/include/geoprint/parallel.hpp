#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace geoprint {

/// Worker count used by parallel loops. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index must write only its own output slot.
template <class F>
void parallel_for(size_t n, F&& body) {
    unsigned workers = std::min<size_t>(thread_count(), n / 256 + 1);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace geoprint
