#include "spx/spxtrack.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "spx/harness.hpp"
#include "spx/media.hpp"
#include "spx/tracker.hpp"

struct spx_config {
    spx::TrackerConfig value;
};

struct spx_image {
    spx::ImageRGB value;
};

struct spx_tracker {
    spx::TrackerState state;
};

struct spx_sequence {
    spx::Sequence value;
};

struct spx_ope_result {
    spx::OpeResult value;
};

namespace {

thread_local std::string last_error;

spx_status fail(spx_status status, const char* what)
{
    last_error = what;
    return status;
}

spx_status to_status(spx::ErrorCode code)
{
    using spx::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return SPX_ERR_INVALID_ARGUMENT;
    case ErrorCode::Io: return SPX_ERR_IO;
    case ErrorCode::Parameter: return SPX_ERR_PARAMETER;
    case ErrorCode::InvalidState: return SPX_ERR_INVALID_STATE;
    case ErrorCode::DegenerateRegion: return SPX_ERR_DEGENERATE_REGION;
    case ErrorCode::DegenerateGeometry: return SPX_ERR_DEGENERATE_GEOMETRY;
    case ErrorCode::Initialization: return SPX_ERR_INITIALIZATION;
    case ErrorCode::TrackingFailure: return SPX_ERR_TRACKING_FAILURE;
    case ErrorCode::Ingestion: return SPX_ERR_INGESTION;
    case ErrorCode::Internal: return SPX_ERR_INTERNAL;
    }
    return SPX_ERR_INTERNAL;
}

template <typename Fn>
spx_status guarded(Fn&& fn)
{
    try {
        fn();
        return SPX_OK;
    } catch (const spx::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SPX_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SPX_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SPX_ERR_INTERNAL, "unknown error");
    }
}

spx::BoundingBox to_box(spx_box b)
{
    return {b.x, b.y, b.w, b.h};
}

spx_box from_box(const spx::BoundingBox& b)
{
    return {b.x, b.y, b.w, b.h};
}

spx_diagnostics from_diag(const spx::Diagnostics& d)
{
    spx_diagnostics out{};
    out.frame_index = d.frame_index;
    out.best_loglik = d.best_loglik;
    out.re_pos = d.re_pos;
    out.has_re_neg = d.re_neg.has_value();
    out.re_neg = d.re_neg.value_or(0.0);
    out.gate_loglik = d.gate_loglik;
    out.accepted = d.accepted;
    out.positive_updated = d.positive_updated;
    out.failed_particles = d.failed_particles;
    return out;
}

#define SPX_REQUIRE(cond)                                                                          \
    do {                                                                                           \
        if (!(cond))                                                                               \
            return fail(SPX_ERR_INVALID_ARGUMENT, "null or invalid argument: " #cond);           \
    } while (0)

} // namespace

extern "C" {

const char* spx_version(void)
{
    return "1.0.0";
}

const char* spx_last_error(void)
{
    return last_error.c_str();
}

const char* spx_status_string(spx_status status)
{
    switch (status) {
    case SPX_OK: return "ok";
    case SPX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SPX_ERR_IO: return "i/o error";
    case SPX_ERR_PARAMETER: return "parameter error";
    case SPX_ERR_INVALID_STATE: return "invalid state";
    case SPX_ERR_DEGENERATE_REGION: return "degenerate region";
    case SPX_ERR_DEGENERATE_GEOMETRY: return "degenerate geometry";
    case SPX_ERR_INITIALIZATION: return "initialization error";
    case SPX_ERR_TRACKING_FAILURE: return "tracking failure";
    case SPX_ERR_INGESTION: return "ingestion error";
    case SPX_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

spx_status spx_config_create(spx_config** out)
{
    SPX_REQUIRE(out);
    return guarded([&] { *out = new spx_config{}; });
}

spx_status spx_config_load(const char* path, spx_config** out)
{
    SPX_REQUIRE(path && out);
    return guarded([&] { *out = new spx_config{spx::load_config(path)}; });
}

spx_status spx_config_set(spx_config* config, const char* key, const char* value)
{
    SPX_REQUIRE(config && key && value);
    return guarded([&] {
        spx::TrackerConfig next = config->value;
        spx::set_config_value(next, key, value);
        config->value = next;
    });
}

spx_status spx_config_validate(const spx_config* config)
{
    SPX_REQUIRE(config);
    return guarded([&] { spx::validate(config->value); });
}

size_t spx_config_format(const spx_config* config, char* buffer, size_t capacity)
{
    if (!config)
        return 0;
    const std::string text = spx::format_config(config->value);
    if (buffer && capacity > 0) {
        const size_t n = std::min(capacity - 1, text.size());
        std::memcpy(buffer, text.data(), n);
        buffer[n] = '\0';
    }
    return text.size();
}

void spx_config_free(spx_config* config)
{
    delete config;
}

spx_status spx_image_load(const char* path, spx_image** out)
{
    SPX_REQUIRE(path && out);
    return guarded([&] { *out = new spx_image{spx::load_image(path)}; });
}

spx_status spx_image_from_rgb8(int width, int height, const unsigned char* rgb, spx_image** out)
{
    SPX_REQUIRE(rgb && out && width > 0 && height > 0);
    return guarded([&] {
        const auto n = static_cast<std::size_t>(width) * height * 3;
        *out = new spx_image{spx::image_from_rgb8(width, height, {rgb, n})};
    });
}

int spx_image_width(const spx_image* image)
{
    return image ? image->value.width() : 0;
}

int spx_image_height(const spx_image* image)
{
    return image ? image->value.height() : 0;
}

void spx_image_free(spx_image* image)
{
    delete image;
}

spx_status spx_tracker_create(const spx_config* config, const spx_image* first_frame,
                              spx_box init_box, spx_tracker** out)
{
    SPX_REQUIRE(config && first_frame && out);
    return guarded([&] {
        *out = new spx_tracker{spx::init(first_frame->value, to_box(init_box), config->value)};
    });
}

spx_status spx_tracker_step(spx_tracker* tracker, const spx_image* frame, spx_box* box,
                            spx_diagnostics* diagnostics)
{
    SPX_REQUIRE(tracker && frame);
    return guarded([&] {
        const spx::StepResult r = spx::step(tracker->state, frame->value);
        if (box)
            *box = from_box(r.box);
        if (diagnostics)
            *diagnostics = from_diag(r.diagnostics);
    });
}

long long spx_tracker_frame_index(const spx_tracker* tracker)
{
    return tracker ? tracker->state.frame_index : -1;
}

spx_status spx_tracker_save_dictionary(const spx_tracker* tracker, const char* path, int binary)
{
    SPX_REQUIRE(tracker && path && tracker->state.coder);
    return guarded([&] {
        const auto& dict = tracker->state.coder->dictionary();
        if (binary)
            spx::save_dictionary_binary(path, dict);
        else
            spx::save_dictionary_text(path, dict);
    });
}

void spx_tracker_free(spx_tracker* tracker)
{
    delete tracker;
}

spx_status spx_sequence_load(const char* dir, spx_sequence** out)
{
    SPX_REQUIRE(dir && out);
    return guarded([&] { *out = new spx_sequence{spx::load_sequence(dir)}; });
}

size_t spx_sequence_length(const spx_sequence* seq)
{
    return seq ? seq->value.frames.size() : 0;
}

const char* spx_sequence_name(const spx_sequence* seq)
{
    return seq ? seq->value.name.c_str() : "";
}

spx_status spx_sequence_ground_truth(const spx_sequence* seq, size_t index, spx_box* box)
{
    SPX_REQUIRE(seq && box && index < seq->value.ground_truth.size());
    *box = from_box(seq->value.ground_truth[index]);
    return SPX_OK;
}

void spx_sequence_free(spx_sequence* seq)
{
    delete seq;
}

spx_status spx_run_ope(const spx_config* config, const spx_sequence* seq, spx_progress_fn progress,
                       void* user, spx_ope_result** out)
{
    SPX_REQUIRE(config && seq && out);
    return guarded([&] {
        spx::ProgressFn fn;
        if (progress)
            fn = [progress, user](const spx::FrameRecord& r) {
                progress(r.index, from_box(r.box), r.iou, user);
            };
        *out = new spx_ope_result{spx::run_ope(config->value, seq->value, fn)};
    });
}

size_t spx_ope_result_length(const spx_ope_result* result)
{
    return result ? result->value.frames.size() : 0;
}

spx_status spx_ope_result_frame(const spx_ope_result* result, size_t index, spx_box* box,
                                double* iou, double* center_error)
{
    SPX_REQUIRE(result && index < result->value.frames.size());
    const auto& f = result->value.frames[index];
    if (box)
        *box = from_box(f.box);
    if (iou)
        *iou = f.iou;
    if (center_error)
        *center_error = f.cle;
    return SPX_OK;
}

spx_status spx_ope_result_diagnostics(const spx_ope_result* result, size_t index,
                                      spx_diagnostics* diagnostics)
{
    SPX_REQUIRE(result && diagnostics && index < result->value.frames.size());
    *diagnostics = from_diag(result->value.frames[index].diagnostics);
    return SPX_OK;
}

spx_status spx_ope_result_summary(const spx_ope_result* result, double* auc,
                                  double* precision_at_20, double* mean_iou, double* seconds)
{
    SPX_REQUIRE(result && !result->value.frames.empty());
    return guarded([&] {
        const auto ious = result->value.ious();
        if (auc)
            *auc = spx::success_curve(ious).auc;
        if (precision_at_20)
            *precision_at_20 = spx::precision_at(spx::precision_curve(result->value.center_errors()));
        if (mean_iou) {
            double sum = 0.0;
            for (double v : ious)
                sum += v;
            *mean_iou = sum / ious.size();
        }
        if (seconds)
            *seconds = result->value.seconds;
    });
}

spx_status spx_ope_result_write(const spx_ope_result* result, const spx_sequence* seq,
                                const char* out_dir, int overlay)
{
    SPX_REQUIRE(result && seq && out_dir);
    return guarded([&] { spx::write_results(out_dir, result->value, seq->value, overlay != 0); });
}

void spx_ope_result_free(spx_ope_result* result)
{
    delete result;
}

spx_status spx_evaluate(const char* results_dir, const char* out_dir, double* auc,
                        double* precision_at_20)
{
    SPX_REQUIRE(results_dir && out_dir);
    return guarded([&] {
        const spx::EvalSummary s = spx::evaluate_results(results_dir, out_dir);
        if (auc)
            *auc = s.success.auc;
        if (precision_at_20)
            *precision_at_20 = spx::precision_at(s.precision);
    });
}

double spx_iou(spx_box a, spx_box b)
{
    return spx::iou(to_box(a), to_box(b));
}

double spx_center_error(spx_box a, spx_box b)
{
    return spx::center_error(to_box(a), to_box(b));
}

} // extern "C"
