#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace kernelsum {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays exact
/// when an addend is larger in magnitude than the running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        // TwoSum: e is the exact rounding error of sum_ + x, without a branch.
        const double t = sum_ + x;
        const double z = t - sum_;
        comp_ += (sum_ - (t - z)) + (x - z);
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> v) {
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
}

/// Worker count for parallel loops: hardware concurrency, capped by the
/// KERNELSUM_THREADS environment variable when it holds a positive integer.
inline unsigned thread_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KERNELSUM_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

/// Runs body(begin, end) over a static partition of [0, n) into contiguous
/// chunks, one per worker. The partition depends only on n and the worker
/// count, and every index is handled exactly once, so per-index outputs are
/// reproducible. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t n, Body&& body, unsigned max_workers = 0) {
    if (n == 0) return;
    unsigned workers = thread_count();
    if (max_workers) workers = std::min(workers, max_workers);
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        const std::size_t b = t * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b >= e) break;
        pool.emplace_back([&, b, e] {
            try {
                body(b, e);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace kernelsum
