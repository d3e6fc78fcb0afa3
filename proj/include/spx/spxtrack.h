/* C interface to the superpixel tensor tracker. Every object is an opaque
 * handle released by its matching *_free function. Functions returning
 * spx_status leave a human-readable message in spx_last_error() on failure;
 * the message is per-thread and valid until the next failing call on that
 * thread. */
#ifndef SPXTRACK_H
#define SPXTRACK_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(SPX_BUILDING_LIBRARY)
#define SPX_API __declspec(dllexport)
#else
#define SPX_API __declspec(dllimport)
#endif
#else
#define SPX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spx_status {
    SPX_OK = 0,
    SPX_ERR_INVALID_ARGUMENT = 1,
    SPX_ERR_IO = 2,
    SPX_ERR_PARAMETER = 3,
    SPX_ERR_INVALID_STATE = 4,
    SPX_ERR_DEGENERATE_REGION = 5,
    SPX_ERR_DEGENERATE_GEOMETRY = 6,
    SPX_ERR_INITIALIZATION = 7,
    SPX_ERR_TRACKING_FAILURE = 8,
    SPX_ERR_INGESTION = 9,
    SPX_ERR_INTERNAL = 10
} spx_status;

typedef struct spx_config spx_config;
typedef struct spx_image spx_image;
typedef struct spx_tracker spx_tracker;
typedef struct spx_sequence spx_sequence;
typedef struct spx_ope_result spx_ope_result;

/* Top-left corner plus size, in pixels. */
typedef struct spx_box {
    double x;
    double y;
    double w;
    double h;
} spx_box;

typedef struct spx_diagnostics {
    long long frame_index;
    double best_loglik;
    double re_pos;
    double re_neg; /* meaningful only when has_re_neg != 0 */
    int has_re_neg;
    double gate_loglik;
    int accepted;
    int positive_updated;
    int failed_particles;
} spx_diagnostics;

SPX_API const char* spx_version(void);
SPX_API const char* spx_last_error(void);
SPX_API const char* spx_status_string(spx_status status);

/* Tracker configuration: defaults, or a flat "key = value" file. */
SPX_API spx_status spx_config_create(spx_config** out);
SPX_API spx_status spx_config_load(const char* path, spx_config** out);
SPX_API spx_status spx_config_set(spx_config* config, const char* key, const char* value);
SPX_API spx_status spx_config_validate(const spx_config* config);
/* Writes the configuration in file syntax; returns the length needed,
 * excluding the terminator. */
SPX_API size_t spx_config_format(const spx_config* config, char* buffer, size_t capacity);
SPX_API void spx_config_free(spx_config* config);

SPX_API spx_status spx_image_load(const char* path, spx_image** out);
/* Interleaved 8-bit RGB, width * height * 3 bytes. */
SPX_API spx_status spx_image_from_rgb8(int width, int height, const unsigned char* rgb,
                                       spx_image** out);
SPX_API int spx_image_width(const spx_image* image);
SPX_API int spx_image_height(const spx_image* image);
SPX_API void spx_image_free(spx_image* image);

/* Frame-by-frame tracking. */
SPX_API spx_status spx_tracker_create(const spx_config* config, const spx_image* first_frame,
                                      spx_box init_box, spx_tracker** out);
SPX_API spx_status spx_tracker_step(spx_tracker* tracker, const spx_image* frame, spx_box* box,
                                    spx_diagnostics* diagnostics);
SPX_API long long spx_tracker_frame_index(const spx_tracker* tracker);
/* binary != 0: flat z x B little-endian float64; otherwise one atom per text line. */
SPX_API spx_status spx_tracker_save_dictionary(const spx_tracker* tracker, const char* path,
                                               int binary);
SPX_API void spx_tracker_free(spx_tracker* tracker);

/* OTB-style sequence directories (img/ + groundtruth_rect.txt). */
SPX_API spx_status spx_sequence_load(const char* dir, spx_sequence** out);
SPX_API size_t spx_sequence_length(const spx_sequence* seq);
SPX_API const char* spx_sequence_name(const spx_sequence* seq);
SPX_API spx_status spx_sequence_ground_truth(const spx_sequence* seq, size_t index, spx_box* box);
SPX_API void spx_sequence_free(spx_sequence* seq);

typedef void (*spx_progress_fn)(int frame, spx_box box, double iou, void* user);

/* One-pass evaluation over a whole sequence. */
SPX_API spx_status spx_run_ope(const spx_config* config, const spx_sequence* seq,
                               spx_progress_fn progress, void* user, spx_ope_result** out);
SPX_API size_t spx_ope_result_length(const spx_ope_result* result);
SPX_API spx_status spx_ope_result_frame(const spx_ope_result* result, size_t index, spx_box* box,
                                        double* iou, double* center_error);
SPX_API spx_status spx_ope_result_diagnostics(const spx_ope_result* result, size_t index,
                                              spx_diagnostics* diagnostics);
SPX_API spx_status spx_ope_result_summary(const spx_ope_result* result, double* auc,
                                          double* precision_at_20, double* mean_iou,
                                          double* seconds);
/* results.csv, diagnostics.csv, summary.json and, with overlay != 0, PNG overlays. */
SPX_API spx_status spx_ope_result_write(const spx_ope_result* result, const spx_sequence* seq,
                                        const char* out_dir, int overlay);
SPX_API void spx_ope_result_free(spx_ope_result* result);

/* Pools every results.csv under results_dir and writes curve CSVs plus a
 * JSON summary into out_dir. auc and precision_at_20 may be NULL. */
SPX_API spx_status spx_evaluate(const char* results_dir, const char* out_dir, double* auc,
                                double* precision_at_20);

SPX_API double spx_iou(spx_box a, spx_box b);
SPX_API double spx_center_error(spx_box a, spx_box b);

#ifdef __cplusplus
}
#endif

#endif
