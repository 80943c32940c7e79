#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cos/errors.hpp"

namespace cosim {

using Context = std::vector<double>;

// Uniform grid over [0,1]^d with `slices` cells per dimension.
struct Partition {
    int dim = 1;
    int slices = 1;
    std::uint64_t cell_count = 1;
};

// Linear index plus per-dimension coordinates of one cell. Dimension 0 is the
// least significant digit of the linear index.
struct HypercubeIndex {
    std::uint64_t linear = 0;
    std::vector<int> coords;
};

inline Partition build_partition(int dim, int slices) {
    if (dim < 1) throw ConfigError("partition dimension must be >= 1, got " + std::to_string(dim));
    if (slices < 1) throw ConfigError("slices per dimension must be >= 1, got " + std::to_string(slices));
    constexpr std::uint64_t limit = std::uint64_t{1} << 62;
    std::uint64_t count = 1;
    for (int j = 0; j < dim; ++j) {
        if (count > limit / static_cast<std::uint64_t>(slices)) {
            throw ConfigError("cell count " + std::to_string(slices) + "^" + std::to_string(dim) +
                              " overflows the index range");
        }
        count *= static_cast<std::uint64_t>(slices);
    }
    return Partition{dim, slices, count};
}

inline std::uint64_t locate_linear(const Partition& p, std::span<const double> x) {
    if (static_cast<int>(x.size()) != p.dim) {
        throw ConfigError("context has " + std::to_string(x.size()) + " dimensions, partition expects " +
                          std::to_string(p.dim));
    }
    std::uint64_t linear = 0;
    std::uint64_t stride = 1;
    for (int j = 0; j < p.dim; ++j) {
        const double v = x[static_cast<std::size_t>(j)];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::domain_error("context coordinate " + std::to_string(j) + " = " + std::to_string(v) +
                                    " outside [0,1]");
        }
        int c = static_cast<int>(std::floor(v * p.slices));
        if (c >= p.slices) c = p.slices - 1;  // x = 1.0 falls into the last slice
        linear += stride * static_cast<std::uint64_t>(c);
        stride *= static_cast<std::uint64_t>(p.slices);
    }
    return linear;
}

inline HypercubeIndex locate(const Partition& p, std::span<const double> x) {
    HypercubeIndex idx;
    idx.linear = locate_linear(p, x);
    idx.coords.resize(static_cast<std::size_t>(p.dim));
    std::uint64_t rest = idx.linear;
    for (int j = 0; j < p.dim; ++j) {
        idx.coords[static_cast<std::size_t>(j)] = static_cast<int>(rest % static_cast<std::uint64_t>(p.slices));
        rest /= static_cast<std::uint64_t>(p.slices);
    }
    return idx;
}

inline HypercubeIndex cell_from_linear(const Partition& p, std::uint64_t linear) {
    HypercubeIndex idx;
    idx.linear = linear;
    idx.coords.resize(static_cast<std::size_t>(p.dim));
    for (int j = 0; j < p.dim; ++j) {
        idx.coords[static_cast<std::size_t>(j)] = static_cast<int>(linear % static_cast<std::uint64_t>(p.slices));
        linear /= static_cast<std::uint64_t>(p.slices);
    }
    return idx;
}

// Slices per dimension for a horizon-T run: ceil(T^(1/(3a+d))), with the
// exponent denominator growing by one when time is appended as an extra
// context dimension.
inline int slicing_parameter(std::uint64_t horizon, double alpha, int dim, bool time_as_context = false) {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (dim < 1) throw ConfigError("dimension must be >= 1");
    const double gamma = 1.0 / (3.0 * alpha + dim + (time_as_context ? 1.0 : 0.0));
    const double v = std::pow(static_cast<double>(horizon), gamma);
    // Snap values that are integers up to rounding noise before taking the
    // ceiling (pow(1e8, 0.25) comes out a hair above 100).
    const double m = std::ceil(v - 1e-9);
    if (m < 1.0) return 1;
    if (m > static_cast<double>(std::numeric_limits<int>::max())) {
        throw ConfigError("slicing parameter overflows int for horizon " + std::to_string(horizon));
    }
    return static_cast<int>(m);
}

} // namespace cosim
