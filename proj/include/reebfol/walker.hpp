#pragma once

#include <cstdint>
#include <vector>

#include "reebfol/chart.hpp"
#include "reebfol/linalg.hpp"

namespace reebfol {

/// Position of a leafwise walker in a chart, with everything needed to follow
/// it across walls and identifications.
///
/// `frame` maps displacements in the walker's own (universal cover) frame to
/// chart displacements; walls reflect it and gluings rotate it. `cover` is the
/// accumulated displacement in the walker frame, so |cover| is the leafwise
/// distance from the start on flat charts.
struct WalkerState {
    Vec2 p;
    int sheet = 0;
    double z = 0.0;
    Mat2 frame = Mat2::identity();
    double log_scale = 0.0;  // sum of log transverse scalings crossed
    Vec2 cover;
    int crossings = 0;
    bool truncated = false;
};

/// Moves the walker by `step`, given in the walker frame. Walls reflect, folds
/// reflect and switch sheet, absorbing sides stop the walker, identifications
/// carry it (and the rest of the step) to the glued side. Throws GeometryError
/// when the walker reaches a side with nothing declared.
void advance(const FoliatedChart& chart, WalkerState& w, Vec2 step);

/// Chart-coordinate path with per-sample transverse state.
///
/// log_scale[k] is the cumulative log transverse scaling of all identifications
/// crossed up to sample k, so the holonomy derivative of a measure along the
/// path is log f(end) - log f(start) + log_scale.back().
struct BrownianPath {
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<double> z;
    std::vector<int> sheets;
    std::vector<double> log_scale;
    std::vector<double> distance;  // |cover| per sample
    double max_distance = 0.0;
    std::uint64_t seed = 0;
    bool truncated = false;

    std::size_t size() const { return times.size(); }
    void push(double t, const WalkerState& w);
};

/// Path following a straight line in the walker frame, cut into steps no
/// longer than max_step.
BrownianPath straight_path(const FoliatedChart& chart, Vec2 start, double z, Vec2 direction, double length,
                           double max_step);

// Joins b after a (b must start where a ends); times of b are shifted.
BrownianPath concatenate(const BrownianPath& a, const BrownianPath& b);
// Same samples traversed backwards.
BrownianPath reverse(const BrownianPath& a);

}  // namespace reebfol
