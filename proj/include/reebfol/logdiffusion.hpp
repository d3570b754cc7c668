#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "reebfol/brownian.hpp"
#include "reebfol/measures.hpp"
#include "reebfol/verdict.hpp"

namespace reebfol {

/// Radial cutoff: 1 on [0, R], 0 beyond S R, a quintic smoothstep in between
/// (width (S - 1) R, so the steepest slope is 15 / (8 (S - 1) R)).
/// R = infinity disables the cutoff.
class CutoffSpec {
public:
    CutoffSpec(double R = std::numeric_limits<double>::infinity(), double S = 2.0);

    double R() const { return R_; }
    double S() const { return S_; }
    bool disabled() const { return !std::isfinite(R_); }
    double max_slope() const;

    double operator()(double dist) const;
    double derivative(double dist) const;

private:
    double R_, S_;
};

struct DiffusionParams {
    double T = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 1000;
    CutoffSpec cutoff;
    std::uint64_t seed = 0;
    double se_tolerance = std::numeric_limits<double>::infinity();  // on the exponent, per node
};

struct LogDiffusionResult {
    TransverseMeasureField field;  // carries the uncertainty / derivative channels
    double max_exponent_se = 0.0;
    bool certified = true;  // false when some node's exponent SE exceeds the tolerance
    std::size_t n_truncated = 0;
    std::size_t undefined_laplacian_samples = 0;
};

/// f'(x) = f(x) exp(E[phi(d_max) log|h'_{gamma|[0,T]}|_tau]) at every node, paths
/// started at the node; d_max is the largest leafwise distance reached by the path.
/// The gradient and Laplacian channels of log f' are estimated from the same paths
/// by moving the derivative onto the endpoint.
/// On a one-slice chart with a periodic band the start height is drawn uniformly per path.
LogDiffusionResult log_diffuse(const FoliatedChart& chart, const TransverseMeasureField& tau, const DiffusionParams& p);

struct SuperharmonicReport {
    Verdict verdict = Verdict::Inconclusive;
    double margin = 0.0;
    std::size_t checked = 0, passed = 0, failed = 0, inconclusive = 0;
    std::size_t worst_node = 0;
    double worst_laplacian = 0.0, worst_se = 0.0;
};

/// PASS when Delta log f + 3 se < -margin at every interior node; FAIL when some
/// node has Delta log f - 3 se >= -margin; otherwise INCONCLUSIVE. Uses the
/// Laplacian channel when present, the grid Laplacian (se 0) otherwise.
SuperharmonicReport check_superharmonic(const FoliatedChart& chart, const TransverseMeasureField& tau, double margin);

struct TailDecayReport {
    std::vector<double> radii;
    std::vector<double> exponent;          // mean exponent over the probe points
    std::vector<double> discrepancy;       // max over probes of |exponent(R) - exponent(R_max)|
    std::vector<double> discrepancy_se;
    double scale = 0.0;                    // max over probes of |exponent(R_max)|
    bool monotone = true;                  // non-increasing within 2 SE
};

/// Exponent stability as R grows, on common paths (so differences are paired).
TailDecayReport tail_decay_check(const FoliatedChart& chart, const TransverseMeasureField& tau, const DiffusionParams& p,
                                 const std::vector<double>& radii, const std::vector<Vec2>& probes, int slice = 0);

}  // namespace reebfol
