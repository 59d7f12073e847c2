#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace oswald {

/// Worker count: OSWALD_THREADS env var if set, else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("OSWALD_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

/// Static-partition parallel loop over [0, n). Results must be written to
/// pre-sized containers indexed by i so output order stays deterministic.
/// Exceptions from workers are rethrown on the calling thread.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    int nw = std::min(worker_count(), n);
    if (nw <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nw);
    for (int w = 0; w < nw; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (int i = w; i < n; i += nw) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace oswald
