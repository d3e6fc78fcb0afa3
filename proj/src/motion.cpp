#include "spx/motion.hpp"

#include <random>

#include "spx/error.hpp"

namespace spx {

ParticleSet propagate(const AffineState& anchor, int b, const NoiseSpec& noise,
                      std::uint64_t rng_seed)
{
    if (b < 1)
        throw Error(ErrorCode::Parameter, "particle count must be positive");
    for (double s : noise.sigmas)
        if (!(s >= 0.0))
            throw Error(ErrorCode::Parameter, "noise sigmas must be nonnegative");
    if (!is_finite(anchor))
        throw Error(ErrorCode::InvalidState, "anchor state has non-finite parameters");

    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto& sg = noise.sigmas;

    ParticleSet set;
    set.states.reserve(b);
    set.log_weights.assign(b, 0.0);
    for (int i = 0; i < b; ++i) {
        AffineState s = anchor;
        s.x += sg[0] * gauss(rng);
        s.y += sg[1] * gauss(rng);
        s.theta += sg[2] * gauss(rng);
        s.skew += sg[5] * gauss(rng);

        auto positive_draw = [&](double mean, double sigma) {
            for (int attempt = 0; attempt < 100; ++attempt) {
                const double v = mean + sigma * gauss(rng);
                if (v > 0.0)
                    return v;
            }
            return kMinScale;
        };
        s.scale = positive_draw(anchor.scale, sg[3]);
        s.aspect = positive_draw(anchor.aspect, sg[4]);
        set.states.push_back(s);
    }
    return set;
}

std::size_t map_index(const ParticleSet& particles)
{
    if (particles.states.empty() || particles.states.size() != particles.log_weights.size())
        throw Error(ErrorCode::Parameter, "particle set is empty or inconsistent");
    std::size_t best = 0;
    for (std::size_t i = 1; i < particles.log_weights.size(); ++i)
        if (particles.log_weights[i] > particles.log_weights[best])
            best = i;
    return best;
}

std::pair<AffineState, double> map_estimate(const ParticleSet& particles)
{
    const std::size_t i = map_index(particles);
    return {particles.states[i], particles.log_weights[i]};
}

} // namespace spx
