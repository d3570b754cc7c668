#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reebfol/chart.hpp"
#include "reebfol/measures.hpp"
#include "reebfol/obstruction.hpp"
#include "reebfol/verdict.hpp"

namespace reebfol {

class InstanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Log-diffusion parameters recorded for an instance (the pipeline defaults).
struct RecordedDiffusion {
    double T = 1.0;
    double dt = 1e-3;
    std::size_t n_paths = 1000;
    double R = std::numeric_limits<double>::infinity();
    double S = 2.0;
};

struct ExpectedProperties {
    bool invariant_measure = false;
    bool needs_diffusion = false;  // log f is not superharmonic until log-diffused
    Verdict transversality = Verdict::Fail;
    LPOutcome::Kind lp = LPOutcome::Kind::FeasibleBeta;
    std::optional<double> kappa;  // exact contraction rate, when known
    RecordedDiffusion diffusion;
    // Frozen regression values (exit-cuff probabilities and the like).
    std::vector<std::pair<std::string, double>> reference;

    double value(const std::string& key) const;
};

struct InstanceDescriptor {
    std::string name;
    std::string description;
    FoliatedChart chart;
    TransverseMeasureField tau;
    ExpectedProperties expected;
    int resolution = 0;   // cells per unit length
    double collar = 0.0;  // plateau collar parameter of the density (0 when unused)
    // Complex for the LP stage when the instance has a dedicated one.
    std::optional<LeafComplex> complex;
};

const std::vector<std::string>& instance_names();

/// Named instances: product-torus, example1-quotient, example2-halfplane,
/// example3-pants. resolution 0 picks the instance default.
InstanceDescriptor make_instance(const std::string& name, int resolution = 0);

/// Pants with cuffs b (x = 0), c (x = 1.5) and a (slit y = 1, 0.25 < x < 1.25),
/// made of two copies of [0,1.5] x [0,1] glued along the folds; m square faces
/// per unit (m divisible by 4).
/// Cuffs are marked as level sets of f = 1 on b, c and f = 2 on a.
LeafComplex pants_complex(int m = 4);

// Harmonic measure of cuff a on the pants, sampled at (x, y).
double pants_harmonic_measure(double x, double y);

}  // namespace reebfol
