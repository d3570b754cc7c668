#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "reebfol/chart.hpp"
#include "reebfol/measures.hpp"
#include "reebfol/rng.hpp"
#include "reebfol/walker.hpp"

namespace reebfol {

// Independent random streams carved out of one master seed.
namespace streams {
inline constexpr std::uint32_t kPaths = 0;
inline constexpr std::uint32_t kStarts = 1;
inline constexpr std::uint32_t kDiffusion = 2;
}  // namespace streams

/// Where paths begin: a fixed point, or uniformly over the leaf rectangle
/// (and over both sheets, and over the transverse band when it is periodic).
struct StartSpec {
    enum class Kind { Point, Uniform };
    Kind kind = Kind::Point;
    Vec2 p;
    double z = 0.0;
    int sheet = 0;

    static StartSpec point(Vec2 p, double z = 0.0, int sheet = 0) { return {Kind::Point, p, z, sheet}; }
    static StartSpec uniform(double z = 0.0) { return {Kind::Uniform, {}, z, 0}; }
};

/// Euler-Maruyama sampler for leafwise Brownian motion (generator half the
/// Laplace-Beltrami operator). A step is
///     dX = sigma(X) xi sqrt(dt) + b(X) dt,  sigma sigma^T = g^{-1},
///     b^k = (1 / 2 sqrt g) d_i(sqrt g g^{ik}),
/// with b from central differences of the interpolated metric. Steps longer
/// than the grid spacing are fed to the walker in pieces.
class LeafDiffusion {
public:
    LeafDiffusion(const FoliatedChart& chart, double dt);

    const FoliatedChart& chart() const { return chart_; }
    double dt() const { return dt_; }
    std::int64_t steps(double T) const;

    WalkerState initial(const StartSpec& start, std::uint64_t seed, std::uint64_t path) const;

    // One step using normal pair number `step` of the given noise stream.
    void step(WalkerState& w, const PathNoise& noise, std::uint64_t step) const;

    /// Runs a path for n_steps, calling visit(k, w) after step k (and with k = 0 first).
    template <class Visit>
    void run(WalkerState& w, std::int64_t n_steps, const PathNoise& noise, Visit&& visit) const {
        visit(std::int64_t{0}, w);
        for (std::int64_t k = 1; k <= n_steps; ++k) {
            step(w, noise, static_cast<std::uint64_t>(k - 1));
            visit(k, w);
            if (w.truncated) return;
        }
    }

private:
    Vec2 drift(Vec2 p, int slice) const;

    const FoliatedChart& chart_;
    double dt_;
    double sqrt_dt_;
    double max_piece_;
};

struct TimeBucket {
    double t;
    double mean;
    double se;
};

struct EstimatorReport {
    std::string quantity;
    double estimate = 0.0;
    double se = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_truncated = 0;
    std::uint64_t seed = 0;
    bool truncation_warning = false;  // more than 1% of paths absorbed
    std::vector<TimeBucket> buckets;
    std::vector<std::pair<std::string, double>> extras;

    double extra(const std::string& key) const;
};

struct PathParams {
    double T = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 1000;
    std::uint64_t seed = 0;
    StartSpec start = StartSpec::uniform();
};

BrownianPath sample_path(const FoliatedChart& chart, const StartSpec& start, double T, double dt, std::uint64_t seed,
                         std::uint64_t path_index = 0);

// Final walker states of n independent paths (index order).
std::vector<WalkerState> simulate_endpoints(const FoliatedChart& chart, const PathParams& p);

/// D^t g (x) = E[g(gamma_t)], with truncated paths excluded and counted.
EstimatorReport diffuse(const FoliatedChart& chart, const std::function<double(const WalkerState&)>& g,
                        const PathParams& p);

struct HolonomyParams {
    PathParams paths;
    int n_buckets = 20;
    double fit_start = 0.2;  // fraction of T discarded before fitting / averaging
};

/// Least-squares slope of t -> log|h'_{gamma|[0,t]}|_tau, per path over the
/// buckets in [fit_start T, T], averaged over paths. Buckets carry the mean
/// log-holonomy at each time.
EstimatorReport estimate_contraction_rate(const FoliatedChart& chart, const TransverseMeasureField& tau,
                                          const HolonomyParams& p);

/// Time average of the leafwise Laplacian of log f along paths over
/// [fit_start T, T]. Extra "drift_rate" = half the estimate, the Ito drift of
/// log f, which is what the contraction rate converges to.
EstimatorReport estimate_drift_integral(const FoliatedChart& chart, const TransverseMeasureField& tau,
                                        const HolonomyParams& p);

// Both of the above from one set of paths.
std::pair<EstimatorReport, EstimatorReport> estimate_contraction_and_drift(const FoliatedChart& chart,
                                                                           const TransverseMeasureField& tau,
                                                                           const HolonomyParams& p);

struct StationaryParams {
    PathParams paths;
    double fit_start = 0.2;
    int bins_x = 10, bins_y = 5;  // leaf histogram
    int bins_z = 50;              // transverse histogram over the z band
    double z_lo = 0.0, z_hi = 1.0;
};

struct StationaryReport {
    int bins_x = 0, bins_y = 0, bins_z = 0;
    std::vector<double> leaf_mass, leaf_se;  // occupation fraction per leaf bin (row-major in y)
    std::vector<double> z_mass, z_se;
    double total_mass = 0.0;
    std::size_t n_paths = 0, n_truncated = 0;
    std::uint64_t seed = 0;
    bool truncation_warning = false;
};

/// Occupation measure over [fit_start T, T], averaged over paths; the standard
/// errors are path-level.
StationaryReport estimate_stationary(const FoliatedChart& chart, const StationaryParams& p);

// Chi-square distance sum (mass - ref)^2 / se^2 over bins with se > 0.
double chi_square(const std::vector<double>& mass, const std::vector<double>& se, const std::vector<double>& ref);
// Leaf histogram of the Riemannian area of each bin, normalized to mass 1.
std::vector<double> area_reference(const FoliatedChart& chart, int bins_x, int bins_y);

}  // namespace reebfol
