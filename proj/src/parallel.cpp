#include "fracdiff/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

#include "fracdiff/errors.hpp"

namespace fracdiff {

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int n) {
    if (n < 1) throw DomainError("thread count must be >= 1");
    g_threads.store(n);
}

int thread_count() { return g_threads.load(); }

void parallel_for(long n, const std::function<void(long, long)>& body) {
    const long workers = std::min<long>(thread_count(), n);
    if (workers <= 1) {
        if (n > 0) body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    const long chunk = (n + workers - 1) / workers;
    for (long w = 0; w < workers; ++w) {
        const long lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, w, lo, hi] {
            try {
                body(lo, hi);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace fracdiff
