#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "spx/geometry.hpp"

namespace spx {

// Standard deviations of the random-walk dynamics, ordered
// (x, y, theta, scale, aspect, skew).
struct NoiseSpec {
    std::array<double, 6> sigmas{4.0, 4.0, 0.02, 0.01, 0.002, 0.001};
};

struct ParticleSet {
    std::vector<AffineState> states;
    std::vector<double> log_weights;

    std::size_t size() const { return states.size(); }
};

// Smallest scale/aspect a particle may carry after repeated redraws fail.
inline constexpr double kMinScale = 1e-3;

// b i.i.d. draws from N(anchor, diag(sigmas^2)). Draws with nonpositive scale
// or aspect are redrawn (up to 100 times, then floored at kMinScale).
ParticleSet propagate(const AffineState& anchor, int b, const NoiseSpec& noise,
                      std::uint64_t rng_seed);

// Particle with the largest log weight; ties go to the lowest index.
std::pair<AffineState, double> map_estimate(const ParticleSet& particles);
std::size_t map_index(const ParticleSet& particles);

} // namespace spx
