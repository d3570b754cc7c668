#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reebfol/linalg.hpp"

namespace reebfol {

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Side { XMin, XMax, YMin, YMax };

enum class BoundaryKind {
    Reflect,  // wall of the leaf; paths bounce
    Fold,     // two-sheet fold; paths bounce and change sheet
    Absorb,   // paths stop and are marked truncated
    Glue,     // identification with another boundary segment
};

const char* to_string(Side s);
const char* to_string(BoundaryKind k);
Side side_from_string(const std::string& s);
BoundaryKind boundary_kind_from_string(const std::string& s);

// Coordinate along a side: y on the x-sides, x on the y-sides.
// Outward normal of a side, and the unit tangent in the +u direction.
Vec2 outward_normal(Side s);
Vec2 side_tangent(Side s);

/// One branch of an identification. The branch applies when the transverse
/// coordinate z of the crossing point lies in [z_lo, z_hi).
///   leafwise:   u' = u_scale * u + u_shift on the target side (u_scale = +-1)
///   transverse: z' = z_scale * z + z_shift
/// z_scale is the transverse scaling factor: crossing multiplies tau-lengths
/// by it, so log(z_scale) enters the holonomy.
struct GlueBranch {
    Side target = Side::XMin;
    double u_scale = 1.0;
    double u_shift = 0.0;
    bool swap_sheet = false;
    double z_lo = -std::numeric_limits<double>::infinity();
    double z_hi = std::numeric_limits<double>::infinity();
    double z_scale = 1.0;
    double z_shift = 0.0;
};

struct BoundarySegment {
    Side side = Side::XMin;
    double lo = -std::numeric_limits<double>::infinity();  // interval along the side
    double hi = std::numeric_limits<double>::infinity();
    BoundaryKind kind = BoundaryKind::Reflect;
    std::vector<GlueBranch> branches;  // Glue only
    std::string label;

    bool contains(double u) const { return u >= lo && u <= hi; }
};

struct GridSpec {
    int nx = 2, ny = 2, nz = 1;
    double hx = 1.0, hy = 1.0, hz = 1.0;
    double x0 = 0.0, y0 = 0.0, z0 = 0.0;
};

/// Discretized foliated chart: leaves are the slices z = const of a structured
/// grid, each carrying a leafwise metric per node. Leaf sides are described by
/// boundary segments (walls, folds, absorbing edges, identifications).
///
/// A side made of one full-length Glue segment onto the opposite side with a
/// pure translation is "periodic": the grid then has nx (resp. ny) distinct
/// node columns and node nx is identified with node 0.
///
/// Multi-sheet charts (sheets = 2) model a leaf as two copies of the rectangle
/// glued along Fold segments; node fields are shared by both sheets.
class FoliatedChart {
public:
    FoliatedChart(GridSpec grid, std::vector<Metric2> metric, std::vector<BoundarySegment> boundary, int sheets = 1,
                  double z_period = 0.0);

    const GridSpec& grid() const { return grid_; }
    int sheets() const { return sheets_; }
    const std::vector<BoundarySegment>& boundary() const { return boundary_; }

    int nx() const { return grid_.nx; }
    int ny() const { return grid_.ny; }
    int nz() const { return grid_.nz; }
    std::size_t leaf_nodes() const { return static_cast<std::size_t>(grid_.nx) * grid_.ny; }
    std::size_t node_count() const { return leaf_nodes() * grid_.nz; }
    std::size_t leaf_index(int i, int j) const { return static_cast<std::size_t>(j) * grid_.nx + i; }
    std::size_t node_index(int i, int j, int k) const { return static_cast<std::size_t>(k) * leaf_nodes() + leaf_index(i, j); }

    double x_at(int i) const { return grid_.x0 + i * grid_.hx; }
    double y_at(int j) const { return grid_.y0 + j * grid_.hy; }
    double z_at(int k) const { return grid_.z0 + k * grid_.hz; }

    // Leaf domain [x_min, x_max] x [y_min, y_max].
    double x_min() const { return grid_.x0; }
    double y_min() const { return grid_.y0; }
    double x_max() const { return grid_.x0 + (periodic_x_ ? grid_.nx : grid_.nx - 1) * grid_.hx; }
    double y_max() const { return grid_.y0 + (periodic_y_ ? grid_.ny : grid_.ny - 1) * grid_.hy; }
    double side_coordinate(Side s) const;  // x for x-sides, y for y-sides
    double min_spacing() const { return grid_.hx < grid_.hy ? grid_.hx : grid_.hy; }

    bool periodic_x() const { return periodic_x_; }
    bool periodic_y() const { return periodic_y_; }
    // log of the transverse scaling picked up when crossing x_max -> x_min (resp. y).
    double log_wrap_scale_x() const { return log_wrap_x_; }
    double log_wrap_scale_y() const { return log_wrap_y_; }
    // Transverse band period; 0 means the z direction is not periodic.
    double z_period() const { return z_period_; }

    const Metric2& metric(std::size_t node) const { return metric_[node]; }
    const std::vector<Metric2>& metrics() const { return metric_; }
    bool flat() const { return flat_; }

    // Bilinear interpolation of the leaf metric on slice k (clamped to the domain).
    Metric2 metric_at(double x, double y, int slice) const;

    // Segment governing a boundary point, or nullptr when the side is undeclared there.
    const BoundarySegment* segment_at(Side s, double u) const;

    // A node is interior when every side it lies on is periodic, reflecting or folding there.
    bool is_interior(int i, int j) const;
    // A node is a point of the leaf's interior when it lies on no wall or absorbing side
    // (folds and identifications join the leaf to itself).
    bool is_leaf_interior(int i, int j) const;

    bool contains(Vec2 p, double tol = 1e-9) const;
    int slice_of(double z) const;

private:
    void validate() const;
    void detect_periodicity();
    void check_identifications() const;

    GridSpec grid_;
    std::vector<Metric2> metric_;
    std::vector<BoundarySegment> boundary_;
    int sheets_ = 1;
    double z_period_ = 0.0;
    bool periodic_x_ = false, periodic_y_ = false;
    double log_wrap_x_ = 0.0, log_wrap_y_ = 0.0;
    bool flat_ = true;
};

// Metric sampled at every node of a grid from a closed form g(x, y, z).
std::vector<Metric2> sample_metric(const GridSpec& grid, const std::function<Metric2(double, double, double)>& g);
std::vector<Metric2> flat_metric(const GridSpec& grid);

// Whole-side boundary pieces.
BoundarySegment wall(Side s, BoundaryKind kind = BoundaryKind::Reflect);
// Periodic identification of hi_side (XMax or YMax) with the opposite side; crossing
// hi_side -> opposite multiplies the transverse coordinate by z_scale.
BoundarySegment periodic_seam(Side hi_side, double z_scale = 1.0);

}  // namespace reebfol
