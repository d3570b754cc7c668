#include "reebfol/parallel.hpp"

#include <atomic>
#include <cmath>

namespace reebfol {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }
int threads() { return g_threads; }

MeanSE mean_se(std::span<const double> v) {
    MeanSE r;
    r.n = v.size();
    if (v.empty()) return r;
    r.mean = pairwise_sum(v) / static_cast<double>(v.size());
    if (v.size() < 2) return r;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - r.mean) * (v[i] - r.mean);
    r.sd = std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1));
    r.se = r.sd / std::sqrt(static_cast<double>(v.size()));
    return r;
}

}  // namespace reebfol
