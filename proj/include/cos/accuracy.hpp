#pragma once

#include <span>
#include <variant>
#include <vector>

#include "cos/rng.hpp"

namespace cosim {

// Context-independent accuracy.
struct ConstantAccuracy {
    double value = 0.5;
};

// base + amplitude - scale * ||x - center||^exponent, clamped to [0,1].
// With |amplitude| <= scale * sqrt(d)^exponent the function satisfies the
// Hoelder condition |f(x)-f(x')| <= scale * ||x-x'||^exponent by construction
// (for exponent <= 1).
struct HolderBump {
    double base = 0.5;
    double amplitude = 0.0;
    std::vector<double> center;
    double exponent = 1.0;
    double scale = 1.0;
};

// Values on a uniform grid over [0,1]^d (points_per_dim per axis, flattened
// with dimension 0 fastest), multilinearly interpolated between grid points.
struct PiecewiseGrid {
    int dim = 1;
    int points_per_dim = 2;
    std::vector<double> values;  // size = points_per_dim^dim
};

using AccuracyFunction = std::variant<ConstantAccuracy, HolderBump, PiecewiseGrid>;

// True accuracy pi(x) in [0,1]; deterministic in (f, x).
double synth_accuracy(const AccuracyFunction& f, std::span<const double> x);

// Returns the true label with probability synth_accuracy(f, x) and the
// flipped label otherwise. Consumes exactly one draw.
int sample_prediction(Rng& rng, const AccuracyFunction& f, std::span<const double> x, int true_label);

// Net reward of one classification: indicator-of-correct minus cost.
inline double reward(int prediction, int true_label, double cost) {
    return (prediction == true_label ? 1.0 : 0.0) - cost;
}

// Empirical check of the Hoelder condition on random context pairs.
struct HolderReport {
    double max_ratio = 0.0;      // max |f(x)-f(x')| / ||x-x'||^alpha observed
    double worst_diff = 0.0;
    double worst_dist = 0.0;
    bool pass = true;            // max_ratio <= scale (with tiny tolerance)
};

HolderReport validate_holder(const AccuracyFunction& f, int dim, double scale, double alpha,
                             int n_pairs, Rng& rng);

} // namespace cosim
