#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace reebfol {

// Worker count used by the Monte Carlo loops; affects wall time only.
void set_threads(int n);
int threads();

/// Runs fn(begin, end) over [0, n) in contiguous static chunks, one per worker.
/// Work items must write only to their own output slots.
template <class Fn>
void parallel_for(std::size_t n, Fn fn) {
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads()), n);
    if (workers <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t b = w * chunk, e = std::min(n, b + chunk);
        pool.emplace_back([&, w, b, e] {
            try {
                if (b < e) fn(b, e);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise summation in index order; the result does not depend on how the
/// terms were produced.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

/// Sample mean and standard error sd / sqrt(n) (sd with n - 1 denominator).
MeanSE mean_se(std::span<const double> v);

}  // namespace reebfol
