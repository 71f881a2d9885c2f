#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace mptcs {

// Index-addressed parallel map: each index is computed exactly once by some
// worker and written to its own slot, so results never depend on scheduling.
inline void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    auto run = [&]() {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    int n = std::min(workers, count);
    pool.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(run);
    for (auto& th : pool) th.join();
}

}  // namespace mptcs
