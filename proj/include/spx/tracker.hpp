#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "spx/appearance.hpp"
#include "spx/coding.hpp"
#include "spx/geometry.hpp"
#include "spx/media.hpp"
#include "spx/motion.hpp"
#include "spx/tensor.hpp"

namespace spx {

struct TrackerConfig {
    int template_width = 32;
    int template_height = 32;
    int superpixels = 30;
    double compactness = 20.0;
    int bins = 8;
    int dictionary_size = 50;
    double lambda = 0.01;
    int particles = 600;
    // Perturbed first-frame templates pooled for dictionary learning.
    int dictionary_samples = 600;
    int negatives = 200;
    int update_rate = 5;
    double gamma = 0.5;
    double threshold = 0.0;
    NoiseSpec noise;
    Ranks ranks;
    double forgetting = 0.99;
    Annulus annulus;
    std::uint64_t rng_seed = 0;
};

// Throws Error(Parameter) naming the first offending field.
void validate(const TrackerConfig& config);

struct TrackerState {
    TrackerConfig config;
    std::shared_ptr<const SparseCoder> coder;
    AppearanceModel appearance;
    AffineState last_state;
    long long frame_index = 0; // 1 once init has consumed the first frame

    PoolingContext pooling() const;
};

struct Diagnostics {
    long long frame_index = 0;
    double best_loglik = 0.0;
    double re_pos = 0.0;
    // Absent until the first negative model has been learned.
    std::optional<double> re_neg;
    // Value compared against the threshold by the update gate.
    double gate_loglik = 0.0;
    bool accepted = false;
    bool positive_updated = false;
    int failed_particles = 0;
};

struct StepResult {
    BoundingBox box;
    AffineState state;
    Diagnostics diagnostics;
};

class TrackingFailure : public Error {
public:
    TrackingFailure(const std::string& what, const AffineState& last_good)
        : Error(ErrorCode::TrackingFailure, what), last_good_(last_good)
    {
    }

    const AffineState& last_good_state() const { return last_good_; }

private:
    AffineState last_good_;
};

// Learns the dictionary from the first frame, pools the ground-truth slice
// and seeds the positive model and its pending buffer with it.
TrackerState init(const ImageRGB& frame, const BoundingBox& init_box, const TrackerConfig& config);

// Advances the tracker by one frame.
StepResult step(TrackerState& state, const ImageRGB& frame);

// Deterministic per-frame, per-purpose seed.
std::uint64_t derive_seed(std::uint64_t base, long long frame_index, int stream);

} // namespace spx
