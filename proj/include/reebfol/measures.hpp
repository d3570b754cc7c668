#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "reebfol/chart.hpp"
#include "reebfol/expr.hpp"
#include "reebfol/forms.hpp"
#include "reebfol/walker.hpp"

namespace reebfol {

class MeasureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pathwise derivative information attached to a diffused measure: per node,
/// the standard error of the diffusion exponent, the leafwise gradient and
/// Laplacian of log f, and the standard error of that Laplacian.
struct MeasureChannels {
    std::vector<double> exponent_se;
    std::vector<double> grad_x, grad_y;
    std::vector<double> laplacian;
    std::vector<double> laplacian_se;
};

/// Positive transverse density f, stored as log f at every chart node.
///
/// Values are chart-single-valued; across a periodic seam carrying a transverse
/// scaling s the density obeys f(exit) = s * f(entry), which is what makes
/// log f + sum of log s a well-defined function on the universal cover.
class TransverseMeasureField {
public:
    TransverseMeasureField() = default;
    TransverseMeasureField(const FoliatedChart& chart, std::vector<double> log_f, std::size_t anchor = 0,
                           std::string regularity = "C2");

    static TransverseMeasureField from_expression(const FoliatedChart& chart, const Expression& f,
                                                  std::size_t anchor = 0);
    static TransverseMeasureField constant(const FoliatedChart& chart, double value = 1.0);

    const std::vector<double>& log_values() const { return log_f_; }
    double log_f(std::size_t node) const { return log_f_[node]; }
    double f(std::size_t node) const;
    std::size_t anchor() const { return anchor_; }
    const std::string& regularity() const { return regularity_; }

    // Scales f on every slice so that f at the anchor node equals `value`.
    TransverseMeasureField normalized(const FoliatedChart& chart, double value = 1.0) const;
    // Multiplies f by a constant.
    TransverseMeasureField scaled(double factor) const;

    // Bilinear interpolation of log f at a chart point on slice k, seam-consistent.
    double log_f_at(const FoliatedChart& chart, Vec2 p, int slice) const;
    // Bilinear interpolation of an arbitrary node field (no seam offsets).
    static double interpolate(const FoliatedChart& chart, const std::vector<double>& field, Vec2 p, int slice);

    DiscreteForm log_form(const FoliatedChart& chart, int slice) const;
    // Laplace-Beltrami of log f on every slice; NaN where no stencil exists.
    std::vector<double> laplacian_log(const FoliatedChart& chart) const;
    // Nodal gradient of log f, interleaved (d/dx, d/dy) per node of every slice.
    std::vector<double> gradient_log(const FoliatedChart& chart) const;

    const std::optional<MeasureChannels>& channels() const { return channels_; }
    void set_channels(MeasureChannels ch);

private:
    std::vector<double> log_f_;
    std::size_t anchor_ = 0;
    std::string regularity_ = "C2";
    std::optional<MeasureChannels> channels_;
};

/// log |h'_gamma|_tau: stretch factor of tau-lengths under holonomy along the path.
double holonomy_log_derivative(const BrownianPath& path, const TransverseMeasureField& tau, const FoliatedChart& chart);

/// Samples x_0 < ... < x_n of a real function with images g(x_k).
struct IntervalMapSample {
    std::vector<double> x;
    std::vector<double> g;

    std::vector<double> first_quotients() const;
    std::vector<double> second_quotients() const;
    void validate() const;  // throws MeasureError unless strictly increasing with >= 3 points
};

/// distort(g) = sup over sample quadruples of |g(b)-g(a)|/|b-a| * |d-c|/|g(d)-g(c)|,
/// which on samples is max/min of consecutive difference quotients.
double distortion(const IntervalMapSample& m);

struct DistortionBound {
    double distortion;
    double bound;  // 1 + |I| sup|g''| / inf|g'| with finite-difference derivatives
    bool holds;
};
DistortionBound distortion_bound_check(const IntervalMapSample& m);

}  // namespace reebfol
