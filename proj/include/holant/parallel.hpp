#pragma once

#include <thread>
#include <vector>

namespace holant {

// Map items 0..n-1 through `worker`, then fold the per-item results into `init`
// in index order. The fold order is fixed, so results do not depend on the
// thread count.
template <class R, class Worker, class Merge>
R parallel_map_reduce(std::size_t n, Worker worker, Merge merge, int threads, R init) {
    if (n == 0) return init;
    if (threads < 1) threads = 1;
    threads = (int)std::min<std::size_t>(threads, n);
    if (threads == 1) {
        R acc = init;
        for (std::size_t i = 0; i < n; ++i) {
            R r = worker(i);
            merge(acc, r);
        }
        return acc;
    }
    std::vector<R> results(n, init);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += threads) results[i] = worker(i);
        });
    for (auto& th : pool) th.join();
    R acc = init;
    for (std::size_t i = 0; i < n; ++i) merge(acc, results[i]);
    return acc;
}

}  // namespace holant
