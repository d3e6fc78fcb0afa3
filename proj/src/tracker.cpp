#include "spx/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "spx/snic.hpp"

namespace spx {

namespace {

void require(bool ok, const char* field)
{
    if (!ok)
        throw Error(ErrorCode::Parameter, std::string("invalid tracker config field: ") + field);
}

enum Stream : int { ParticleStream = 0, NegativeStream = 1, DictionaryStream = 2, KMeansStream = 3 };

} // namespace

void validate(const TrackerConfig& c)
{
    require(c.template_width >= 1, "template_width");
    require(c.template_height >= 1, "template_height");
    require(c.superpixels >= 1 && c.superpixels <= c.template_width * c.template_height,
            "superpixels");
    require(c.compactness >= 0.0 && std::isfinite(c.compactness), "compactness");
    require(c.bins >= 1, "bins");
    require(c.dictionary_size >= 1, "dictionary_size");
    require(c.lambda >= 0.0 && std::isfinite(c.lambda), "lambda");
    require(c.particles >= 1, "particles");
    require(c.dictionary_samples >= 0 &&
                static_cast<long long>(c.dictionary_samples + 1) * c.superpixels >= c.dictionary_size,
            "dictionary_samples");
    require(c.negatives >= 1, "negatives");
    require(c.update_rate >= 1, "update_rate");
    require(c.gamma >= 0.0 && c.gamma <= 1.0, "gamma");
    require(std::isfinite(c.threshold), "threshold");
    for (double s : c.noise.sigmas)
        require(s >= 0.0 && std::isfinite(s), "noise");
    require(c.ranks.r1 >= 1 && c.ranks.r1 <= c.dictionary_size, "ranks");
    require(c.ranks.r2 >= 1 && c.ranks.r2 <= c.superpixels, "ranks");
    require(c.ranks.r3 >= 1 && c.ranks.r3 <= c.dictionary_size * c.superpixels, "ranks");
    require(c.forgetting > 0.0 && c.forgetting <= 1.0, "forgetting");
    require(c.annulus.inner > 0.0 && c.annulus.inner < c.annulus.outer, "annulus");
}

std::uint64_t derive_seed(std::uint64_t base, long long frame_index, int stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(frame_index),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(frame_index) >> 32),
                      static_cast<std::uint32_t>(stream)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

PoolingContext TrackerState::pooling() const
{
    PoolingContext ctx;
    ctx.coder = coder.get();
    ctx.template_w = config.template_width;
    ctx.template_h = config.template_height;
    ctx.superpixels = config.superpixels;
    ctx.compactness = config.compactness;
    ctx.bins = config.bins;
    ctx.lambda = config.lambda;
    return ctx;
}

TrackerState init(const ImageRGB& frame, const BoundingBox& box, const TrackerConfig& config)
{
    validate(config);
    if (frame.empty())
        throw Error(ErrorCode::Initialization, "empty first frame");
    if (!(box.w > 0.0 && box.h > 0.0) || !std::isfinite(box.x) || !std::isfinite(box.y) ||
        !std::isfinite(box.w) || !std::isfinite(box.h))
        throw Error(ErrorCode::Initialization, "initial box is degenerate");
    if (box.x >= frame.width() || box.y >= frame.height() || box.x + box.w <= 0.0 ||
        box.y + box.h <= 0.0)
        throw Error(ErrorCode::Initialization, "initial box lies outside the frame");

    const int tw = config.template_width;
    const int th = config.template_height;
    const AffineState anchor = state_from_box(box, tw, th);

    // Dictionary samples: the ground-truth template plus perturbed copies.
    const ParticleSet perturbed = propagate(anchor, std::max(config.dictionary_samples, 1),
                                            config.noise,
                                            derive_seed(config.rng_seed, 0, DictionaryStream));
    std::vector<FeatureVector> samples;
    samples.reserve(static_cast<std::size_t>(config.dictionary_samples + 1) * config.superpixels);
    auto add_samples = [&](const AffineState& s) {
        const Patch patch = extract_template(frame, s, tw, th);
        const LabelMap labels = segment(patch, config.superpixels, config.compactness);
        for (const auto& fm : all_superpixel_features(patch, labels, config.bins))
            samples.push_back(flatten(fm));
    };
    add_samples(anchor);
    for (int i = 0; i < config.dictionary_samples; ++i)
        add_samples(perturbed.states[i]);

    Dictionary dict = learn_dictionary(samples, config.dictionary_size,
                                       derive_seed(config.rng_seed, 0, KMeansStream));

    TrackerState state;
    state.config = config;
    state.coder = std::make_shared<const SparseCoder>(std::move(dict));
    state.last_state = anchor;
    state.frame_index = 1;

    const CodeSlice truth = state.pooling().pool(frame, anchor);
    AppearanceModel& app = state.appearance;
    app.positive = empty_model(truth, config.ranks);
    app.gamma = config.gamma;
    app.update_rate = config.update_rate;
    app.threshold = config.threshold;
    app.forgetting = config.forgetting;
    app.pending.push_back(truth);
    if (static_cast<int>(app.pending.size()) >= app.update_rate) {
        app.positive = incremental_update(app.positive, Tensor3::from_slices(app.pending),
                                          app.forgetting);
        app.pending.clear();
    }
    return state;
}

StepResult step(TrackerState& state, const ImageRGB& frame)
{
    if (!state.coder)
        throw Error(ErrorCode::InvalidState, "tracker is not initialized");
    const TrackerConfig& cfg = state.config;
    const long long frame_index = state.frame_index + 1;
    const PoolingContext pipeline = state.pooling();
    const AppearanceModel& app = state.appearance;

    ParticleSet particles = propagate(state.last_state, cfg.particles, cfg.noise,
                                      derive_seed(cfg.rng_seed, frame_index, ParticleStream));

    Diagnostics diag;
    diag.frame_index = frame_index;
    CodeSlice best_slice;
    ReconstructionError best_pos;
    std::optional<double> best_neg;
    std::size_t best = particles.size();

    for (std::size_t i = 0; i < particles.size(); ++i) {
        CodeSlice slice;
        try {
            slice = pipeline.pool(frame, particles.states[i]);
        } catch (const Error&) {
            particles.log_weights[i] = -std::numeric_limits<double>::infinity();
            ++diag.failed_particles;
            continue;
        }
        const ReconstructionError pos = reconstruction_terms(slice, app.positive, app.gamma);
        std::optional<double> neg;
        if (app.negative)
            neg = reconstruction_terms(slice, *app.negative, app.gamma).total;
        particles.log_weights[i] = log_likelihood(pos.total, neg);
        if (best == particles.size() || particles.log_weights[i] > particles.log_weights[best]) {
            best = i;
            best_slice = std::move(slice);
            best_pos = pos;
            best_neg = neg;
        }
    }
    if (best == particles.size())
        throw TrackingFailure("frame " + std::to_string(frame_index) +
                                  ": every candidate extraction failed",
                              state.last_state);

    const auto [map_state, map_loglik] = map_estimate(particles);
    diag.best_loglik = map_loglik;
    diag.re_pos = best_pos.total;
    diag.re_neg = best_neg;

    const std::uint64_t neg_seed = derive_seed(cfg.rng_seed, frame_index, NegativeStream);
    Tensor3 negatives;
    bool have_negatives = false;
    auto harvest = [&] {
        negatives = collect_negatives(frame, map_state, cfg.negatives, cfg.annulus, pipeline,
                                      neg_seed);
        have_negatives = true;
    };

    if (app.negative) {
        diag.gate_loglik = map_loglik;
    } else {
        // No negative model yet: gate against one learned from this frame's
        // background samples.
        harvest();
        const SubspaceModel bootstrap = learn_negative_model(negatives, app.positive.ranks);
        diag.gate_loglik =
            reconstruction_terms(best_slice, bootstrap, app.gamma).total - best_pos.total;
    }

    if (diag.gate_loglik > app.threshold && !have_negatives)
        harvest();

    UpdateOutcome outcome;
    state.appearance = maybe_update(app, best_slice, diag.gate_loglik, negatives, &outcome);
    diag.accepted = outcome.accepted;
    diag.positive_updated = outcome.positive_updated;

    state.last_state = map_state;
    state.frame_index = frame_index;

    StepResult result;
    result.state = map_state;
    result.box = box_from_state(map_state, cfg.template_width, cfg.template_height);
    result.diagnostics = diag;
    return result;
}

} // namespace spx
