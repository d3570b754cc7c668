#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "reebfol/measures.hpp"
#include "reebfol/verdict.hpp"

namespace reebfol {

class DegenerateReeb : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 1-form a dx + b dy + c dz sampled at every chart node (all slices).
struct OneForm3 {
    std::vector<double> x, y, z;
};

/// Coefficient of dx^dy^dz at every node. Orientation: dx^dy^dz positive,
/// co-orientation of the foliation +dz.
using ThreeFormField = std::vector<double>;
using VectorField3 = std::vector<Vec3>;

/// beta = *2 d log f, with the leaf orientation fixed by the chart's dx^dy and the
/// sign chosen so that tau^d(beta) pairs positively with dz (on the half-plane,
/// f = y gives beta = dx / y). beta(v) = 0 for the transverse field v = f^{-1} d/dz.
/// Uses the gradient channel of tau when present and `use_channels` is set.
OneForm3 build_beta(const FoliatedChart& chart, const TransverseMeasureField& tau, bool use_channels = true);

/// alpha = tau + eps beta = eps beta_x dx + eps beta_y dy + f dz.
OneForm3 build_alpha(const FoliatedChart& chart, const TransverseMeasureField& tau, const OneForm3& beta, double eps);

/// alpha^d(alpha) two ways: directly by central differences of alpha's coefficients
/// (the derivative of f taken as f d log f, so seams with transverse scaling are
/// handled), and by the first-order expansion eps f sqrt(g) (|d log f|^2 - Lap log f).
struct ContactVolume {
    ThreeFormField direct;
    ThreeFormField expansion;        // NaN where the Laplacian has no stencil
    VectorField3 curl;               // components of d(alpha) as a vector (alpha^d(alpha) = alpha . curl)
    double min_direct = 0.0;
    std::size_t argmin = 0;
    double max_disagreement = 0.0;   // max |direct - expansion| over leaf-interior nodes
    bool positive = false;           // direct > 0 at every node
};

ContactVolume contact_volume(const FoliatedChart& chart, const TransverseMeasureField& tau, const OneForm3& beta,
                             double eps, bool use_channels = true);

struct ReebField {
    VectorField3 R;
    double max_kernel_residual = 0.0;  // |d(alpha)(R, .)| / (|d(alpha)| |R|)
    double max_normalization_residual = 0.0;  // |alpha(R) - 1|
};

/// R = curl(alpha) / (alpha . curl(alpha)); throws DegenerateReeb where the volume vanishes.
ReebField reeb_field(const FoliatedChart& chart, const OneForm3& alpha, const ContactVolume& vol);

struct TransverseReport {
    Verdict verdict = Verdict::Fail;
    double min_dalpha_sigma = 0.0;  // d(alpha) on the unit leaf 2-vector
    double min_tau_R = 0.0;
    std::size_t worst_node = 0;
    bool criteria_agree = true;
    bool degenerate = false;  // Reeb field undefined somewhere
    double eps = 0.0;
};

/// PASS iff d(alpha)(sigma) > 0 and tau(R) > 0 at every node; values within
/// `zero_tol` of 0 count as zero.
TransverseReport check_reeb_transverse(const FoliatedChart& chart, const TransverseMeasureField& tau, double eps,
                                       bool use_channels = true, double zero_tol = 1e-10);

/// Largest eps = 2^-k, k = 0..40, at which the direct contact volume and d(alpha)(sigma)
/// are positive at every node.
std::optional<double> auto_epsilon(const FoliatedChart& chart, const TransverseMeasureField& tau,
                                   bool use_channels = true);

}  // namespace reebfol
