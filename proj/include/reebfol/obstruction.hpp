#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reebfol/measures.hpp"

namespace reebfol {

class ComplexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cell complex of a leaf region: faces with rational areas, oriented edges,
/// incidence [df : e] in {-1, +1} (an edge lies on at most two faces), and
/// marked edges on level sets of f with a co-orientation sign (+1 when the
/// edge runs along the boundary of the superlevel set, superlevel on its left).
/// Vertex geometry is optional and only used for plotting and the dd = 0 check.
struct LeafComplex {
    std::vector<mpq_class> area;
    std::vector<std::vector<std::pair<std::size_t, int>>> face_edges;
    std::vector<int> mark;  // per edge: 0 unmarked, +1 / -1 marked
    std::vector<Vec2> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edge_vertices;  // tail, head (empty without geometry)
    std::vector<double> levels;

    std::size_t faces() const { return area.size(); }
    std::size_t edges() const { return mark.size(); }
    std::size_t marked() const;

    // Adds a face and returns its index; edges must already exist.
    std::size_t add_face(mpq_class a, std::vector<std::pair<std::size_t, int>> boundary);
    std::size_t add_edge(int sign = 0);

    /// Throws ComplexError on non-positive areas, bad coefficients, edges on more
    /// than two faces, or (with geometry) face boundaries that are not cycles.
    void validate() const;
};

struct LPOutcome {
    enum class Kind { FeasibleBeta, Obstruction };
    Kind kind = Kind::Obstruction;
    std::vector<mpq_class> beta;     // per edge (FeasibleBeta)
    mpq_class delta;                 // (d beta)_f >= delta area_f, delta > 0
    std::vector<mpq_class> weights;  // per face (Obstruction), >= 0, smallest positive weight 1
    std::size_t reduced_rows = 0, reduced_columns = 0, pivots = 0;
};

std::string to_string(LPOutcome::Kind k);

/// Farkas alternative for { d beta >= delta area, sign(e) beta_e >= 0 on marked e, delta > 0 }.
/// Faces joined through unmarked edges must carry equal weight in any certificate,
/// so the dual is solved over those components with an exact two-phase simplex
/// (Bland's rule); a primal beta is rebuilt from the phase-one Farkas multipliers
/// by spanning-tree flows inside each component.
LPOutcome solve_beta_lp(const LeafComplex& c);

/// Re-checks the returned alternative against the complex in exact arithmetic.
/// Throws ComplexError when the outcome's sizes do not match the complex.
bool verify_certificate(const LPOutcome& o, const LeafComplex& c);

/// Every leaf cell split into four triangles about its centre, then cut along
/// the level curves of log f (piecewise linear on the triangles) at n_levels
/// values spread over the range of f. Periodic sides without transverse scaling
/// wrap; every other side is an unmarked boundary.
LeafComplex extract_complex(const FoliatedChart& chart, const TransverseMeasureField& tau, int slice, int n_levels);

/// Same triangulation with no level curves.
LeafComplex grid_complex(const FoliatedChart& chart, int slice = 0);

struct SweepCase {
    std::string name;
    const FoliatedChart* chart;
    const TransverseMeasureField* tau;
    int slice = 0;
    int n_levels = 3;
};

struct SweepEntry {
    std::string name;
    std::size_t faces = 0, marked = 0;
    LPOutcome::Kind outcome = LPOutcome::Kind::Obstruction;
    bool verified = false;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::size_t obstructions = 0;
};

SweepReport superharmonic_feasibility_sweep(const std::vector<SweepCase>& cases);

}  // namespace reebfol
