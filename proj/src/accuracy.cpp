#include "cos/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "cos/errors.hpp"

namespace cosim {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double eval_bump(const HolderBump& b, std::span<const double> x) {
    if (x.size() != b.center.size()) {
        throw ConfigError("holder_bump center has " + std::to_string(b.center.size()) +
                          " dimensions, context has " + std::to_string(x.size()));
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double dl = x[j] - b.center[j];
        sq += dl * dl;
    }
    const double dist = std::sqrt(sq);
    // Plateau at `base` with a peak (or dip) of height `amplitude` at the
    // center, decaying at rate `scale` per unit distance^exponent.
    const double decay = b.scale * std::pow(dist, b.exponent);
    const double lift = b.amplitude >= 0.0 ? std::max(0.0, b.amplitude - decay)
                                           : -std::max(0.0, -b.amplitude - decay);
    return clamp01(b.base + lift);
}

double eval_grid(const PiecewiseGrid& g, std::span<const double> x) {
    if (static_cast<int>(x.size()) != g.dim) {
        throw ConfigError("piecewise_grid is " + std::to_string(g.dim) + "-dimensional, context has " +
                          std::to_string(x.size()));
    }
    const int n = g.points_per_dim;
    // Cell corner + fractional offset per dimension.
    std::vector<int> base(x.size());
    std::vector<double> frac(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        double pos = std::clamp(x[j], 0.0, 1.0) * (n - 1);
        int b = static_cast<int>(std::floor(pos));
        if (b >= n - 1) b = n - 2;
        if (n == 1) b = 0;
        base[j] = b;
        frac[j] = n == 1 ? 0.0 : pos - b;
    }
    // Multilinear blend over the 2^d surrounding grid points.
    double acc = 0.0;
    const std::size_t corners = std::size_t{1} << x.size();
    for (std::size_t mask = 0; mask < corners; ++mask) {
        double w = 1.0;
        std::size_t idx = 0;
        std::size_t stride = 1;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const bool hi = (mask >> j) & 1u;
            w *= hi ? frac[j] : 1.0 - frac[j];
            int c = base[j] + (hi ? 1 : 0);
            if (c > n - 1) c = n - 1;
            idx += stride * static_cast<std::size_t>(c);
            stride *= static_cast<std::size_t>(n);
        }
        acc += w * g.values[idx];
    }
    return clamp01(acc);
}

} // namespace

double synth_accuracy(const AccuracyFunction& f, std::span<const double> x) {
    return std::visit(
        [&](const auto& fn) -> double {
            using T = std::decay_t<decltype(fn)>;
            if constexpr (std::is_same_v<T, ConstantAccuracy>) {
                return clamp01(fn.value);
            } else if constexpr (std::is_same_v<T, HolderBump>) {
                return eval_bump(fn, x);
            } else {
                return eval_grid(fn, x);
            }
        },
        f);
}

int sample_prediction(Rng& rng, const AccuracyFunction& f, std::span<const double> x, int true_label) {
    const double p = synth_accuracy(f, x);
    const double u = uniform_double(rng);
    return u < p ? true_label : 1 - true_label;
}

HolderReport validate_holder(const AccuracyFunction& f, int dim, double scale, double alpha,
                             int n_pairs, Rng& rng) {
    HolderReport rep;
    std::vector<double> a(static_cast<std::size_t>(dim));
    std::vector<double> b(static_cast<std::size_t>(dim));
    for (int i = 0; i < n_pairs; ++i) {
        double sq = 0.0;
        for (int j = 0; j < dim; ++j) {
            a[static_cast<std::size_t>(j)] = uniform_double(rng);
            b[static_cast<std::size_t>(j)] = uniform_double(rng);
            const double dl = a[static_cast<std::size_t>(j)] - b[static_cast<std::size_t>(j)];
            sq += dl * dl;
        }
        const double dist = std::sqrt(sq);
        if (dist <= 0.0) continue;
        const double diff = std::abs(synth_accuracy(f, a) - synth_accuracy(f, b));
        const double ratio = diff / std::pow(dist, alpha);
        if (ratio > rep.max_ratio) {
            rep.max_ratio = ratio;
            rep.worst_diff = diff;
            rep.worst_dist = dist;
        }
    }
    rep.pass = rep.max_ratio <= scale * (1.0 + 1e-9);
    return rep;
}

} // namespace cosim
