#pragma once

#include <cstdint>
#include <random>

namespace cosim {

using Rng = std::mt19937_64;

// Logical sub-streams hanging off one master seed. Every consumer of
// randomness in a simulation gets its own stream so that, e.g., delay draws
// never perturb decision draws.
enum class Stream : std::uint32_t {
    arrival = 1,     // context + true-label generation
    decision = 2,    // candidate picks and tie breaks
    prediction = 3,  // Bernoulli classifier outputs
    delay = 4,       // feedback-delay draws
};

inline Rng make_stream(std::uint64_t master_seed, int learner, Stream stream,
                       std::uint32_t phase = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(learner),
                      static_cast<std::uint32_t>(stream), phase};
    return Rng(seq);
}

// One raw draw -> uniform double in [0, 1). Self-contained so sequences are
// identical across standard libraries.
inline double uniform_double(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Single draw, multiply-shift reduction.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    using u128 = unsigned __int128;
    return static_cast<std::size_t>((static_cast<u128>(rng()) * n) >> 64);
}

} // namespace cosim
