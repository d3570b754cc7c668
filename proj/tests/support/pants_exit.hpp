#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace oracle {

struct ExitCounts {
    long a = 0, b = 0, c = 0;
    double mean_time = 0.0;
};

// Plain Euler walk on [0,1.5] x [0,1] with mirror reflection off y = 0 and off
// y = 1 outside the slit 0.25 < x < 1.25; stops on x = 0 (b), x = 1.5 (c) or the slit (a).
inline ExitCounts pants_first_exit(double x0, double y0, long n, double dt, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> N(0.0, std::sqrt(dt));
    ExitCounts r;
    double total = 0.0;
    for (long k = 0; k < n; ++k) {
        double x = x0, y = y0, t = 0.0;
        for (;;) {
            x += N(rng);
            y += N(rng);
            t += dt;
            if (y < 0) y = -y;
            if (x <= 0) { ++r.b; break; }
            if (x >= 1.5) { ++r.c; break; }
            if (y >= 1) {
                if (x > 0.25 && x < 1.25) { ++r.a; break; }
                y = 2 - y;
            }
        }
        total += t;
    }
    r.mean_time = total / n;
    return r;
}

}  // namespace oracle
