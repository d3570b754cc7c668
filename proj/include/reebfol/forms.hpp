#pragma once

#include <cstddef>
#include <vector>

#include "reebfol/chart.hpp"

namespace reebfol {

enum class FormLayout {
    Cochain,  // integrated over cells: nodes, edges (x-edges then y-edges), faces
    Nodal,    // point values at nodes; a 1-form stores (a, b) for a dx + b dy
};

/// 0-, 1- or 2-form on one leaf slice of a chart.
///
/// Cell counts for cochains: with mx = nx (periodic in x) or nx - 1, and my
/// likewise, there are mx*ny x-edges, nx*my y-edges and mx*my faces.
/// A 0-form flagged log_density is the log of a transverse density: across a
/// periodic seam its values jump by the chart's log transverse scaling.
struct DiscreteForm {
    int degree = 0;
    FormLayout layout = FormLayout::Cochain;
    int slice = 0;
    bool log_density = false;
    std::vector<double> values;

    static DiscreteForm zero_form(const FoliatedChart& chart, std::vector<double> node_values, int slice = 0,
                                  bool log_density = false);
    static DiscreteForm nodal_one_form(const FoliatedChart& chart, std::vector<double> ab, int slice = 0);
};

struct CellCounts {
    std::size_t nodes, x_edges, y_edges, faces;
    std::size_t edges() const { return x_edges + y_edges; }
};

CellCounts cell_counts(const FoliatedChart& chart);
std::size_t expected_size(const FoliatedChart& chart, int degree, FormLayout layout);
// Throws GeometryError when the value array does not match the cell count.
void check_form(const FoliatedChart& chart, const DiscreteForm& form);

std::size_t x_edge_index(const FoliatedChart& chart, int i, int j);
std::size_t y_edge_index(const FoliatedChart& chart, int i, int j);
std::size_t face_index(const FoliatedChart& chart, int i, int j);

/// Coboundary. Cochain input gives cochain output (exact, dd = 0); a nodal
/// 0-form is treated as its own cochain; nodal 1-forms are differentiated by
/// central differences into a nodal 2-form coefficient of dx^dy.
DiscreteForm exterior_d(const DiscreteForm& form, const FoliatedChart& chart);

/// Nodal gradient (df/dx, df/dy) of a 0-form: central differences inside,
/// periodic wrap across seams, second-order one-sided differences at walls.
DiscreteForm gradient(const DiscreteForm& zero_form, const FoliatedChart& chart);

/// Leafwise Laplace-Beltrami (1/sqrt g) d_i(sqrt g g^ij d_j f), conservative
/// 9-point stencil; exactly the 5-point stencil on flat metrics. Walls use
/// mirror ghosts. Nodes on absorbing, glued (non-periodic) or undeclared sides
/// raise GeometryError, unless interior_only is set, in which case they get NaN.
DiscreteForm laplace_beltrami(const DiscreteForm& field, const FoliatedChart& chart, bool interior_only = false);

/// Leafwise Hodge star on 1-forms (rotation by +90 degrees in the metric):
///   *(a dx + b dy) = sqrt(g) [ (a g^11 + b g^12) dy - (a g^12 + b g^22) dx ].
/// Nodal input is transformed pointwise; cochains go through nodal values.
DiscreteForm hodge_star2(const DiscreteForm& one_form, const FoliatedChart& chart);

// Conversions between cochain and nodal 1-forms.
DiscreteForm to_nodal(const DiscreteForm& one_form, const FoliatedChart& chart);
DiscreteForm to_cochain(const DiscreteForm& one_form, const FoliatedChart& chart);

}  // namespace reebfol
