#include "elastoborn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace elastoborn {

namespace {

std::atomic<int> g_threads{0};

int env_threads() {
    if (const char* s = std::getenv("ELASTOBORN_THREADS")) {
        try {
            int n = std::stoi(s);
            if (n > 0) return n;
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

constexpr std::size_t kBlock = 4096;

}  // namespace

int thread_count() {
    int n = g_threads.load();
    if (n <= 0) {
        n = env_threads();
        g_threads.store(n);
    }
    return n;
}

void set_thread_count(int n) { g_threads.store(n > 0 ? n : env_threads()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    std::size_t t = std::min<std::size_t>(std::size_t(thread_count()), n);
    if (t <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t - 1);
    std::size_t chunk = (n + t - 1) / t;
    for (std::size_t k = 1; k < t; ++k) {
        std::size_t b = k * chunk, e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&body, b, e] { body(b, e); });
    }
    body(0, std::min(n, chunk));
    for (auto& th : pool) th.join();
}

double ordered_sum(std::size_t n, const std::function<double(std::size_t)>& f) {
    std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nb, 0.0);
    parallel_for(nb, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            double s = 0.0;
            std::size_t e = std::min(n, (b + 1) * kBlock);
            for (std::size_t i = b * kBlock; i < e; ++i) s += f(i);
            partial[b] = s;
        }
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

}  // namespace elastoborn
