#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace reebfol {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A draw is a pure function of (key, counter), so every Monte Carlo path owns an
/// addressable stream and results never depend on the thread schedule.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit constexpr Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    constexpr Counter operator()(Counter ctr) const {
        Key k = key_;
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, k);
            k[0] += kWeyl0;
            k[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
        return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }

    Key key_;
};

/// SplitMix64 finalizer; used to derive independent keys from a master seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Stream of standard normal pairs for one Monte Carlo path.
///
/// Draw number `step` of path `path` in stream `stream` is fixed by the master
/// seed alone. Box-Muller on two 53-bit uniforms per step.
class PathNoise {
public:
    PathNoise(std::uint64_t master_seed, std::uint32_t stream, std::uint64_t path)
        : gen_(mix64(master_seed ^ mix64(stream))),
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)),
          stream_(stream) {}

    struct Pair {
        double a, b;
    };

    Pair normal_pair(std::uint64_t step) const {
        const auto r = gen_({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), path_lo_,
                             path_hi_ ^ (stream_ << 16)});
        const double u1 = to_unit_open(r[0], r[1]);
        const double u2 = to_unit_open(r[2], r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        return {rad * std::cos(ang), rad * std::sin(ang)};
    }

    double uniform(std::uint64_t step) const {
        const auto r = gen_({static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32), path_lo_,
                             path_hi_ ^ (stream_ << 16) ^ 0x80000000u});
        return to_unit_open(r[0], r[1]);
    }

private:
    // Uniform in (0, 1] with 53 bits.
    static double to_unit_open(std::uint32_t hi, std::uint32_t lo) {
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    Philox4x32 gen_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t stream_;
};

}  // namespace reebfol
