#include "flowsal/parallel.hpp"

#include <atomic>

namespace flowsal {

namespace {
std::atomic<int> g_workers{0};

int effective_workers() {
    int w = g_workers.load(std::memory_order_relaxed);
    if (w <= 0) {
        unsigned hc = std::thread::hardware_concurrency();
        w = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return w;
}
}  // namespace

void set_worker_count(int workers) {
    g_workers.store(workers, std::memory_order_relaxed);
}

int worker_count() {
    return effective_workers();
}

void parallel_for_chunks(int n, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    int w = std::min(effective_workers(), n);
    if (w <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(w));
    int chunk = (n + w - 1) / w;
    for (int t = 0; t < w; ++t) {
        int begin = t * chunk;
        int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    parallel_for_chunks(n, [&fn](int begin, int end) {
        for (int i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace flowsal
