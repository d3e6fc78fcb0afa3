/* Exercises the C interface end to end from plain C. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "spx/spxtrack.h"

static int failures = 0;

#define EXPECT(cond)                                                                   \
    do {                                                                               \
        if (!(cond)) {                                                                 \
            fprintf(stderr, "%s:%d: expectation failed: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                                \
        }                                                                              \
    } while (0)

static int frames_seen = 0;

static void on_frame(int frame, spx_box box, double iou, void* user)
{
    (void)box;
    (void)iou;
    (void)user;
    EXPECT(frame == frames_seen + 1);
    frames_seen = frame;
}

static spx_image* checker(int w, int h)
{
    unsigned char* rgb = malloc((size_t)w * h * 3);
    spx_image* img = NULL;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                rgb[(y * w + x) * 3 + c] = (unsigned char)((((x / 4) + (y / 4)) % 2) ? 40 * c + 60 : 220 - 50 * c);
    EXPECT(spx_image_from_rgb8(w, h, rgb, &img) == SPX_OK);
    free(rgb);
    return img;
}

int main(int argc, char** argv)
{
    if (argc != 2) {
        fprintf(stderr, "usage: %s <fixture dir>\n", argv[0]);
        return 2;
    }
    char path[4096];

    EXPECT(strlen(spx_version()) > 0);
    EXPECT(strcmp(spx_status_string(SPX_OK), "ok") == 0);
    EXPECT(spx_iou((spx_box){0, 0, 2, 2}, (spx_box){1, 0, 2, 2}) > 0.333333 &&
           spx_iou((spx_box){0, 0, 2, 2}, (spx_box){1, 0, 2, 2}) < 0.333334);
    EXPECT(spx_center_error((spx_box){-1, -1, 2, 2}, (spx_box){2, 3, 2, 2}) == 5.0);

    /* Configuration. */
    spx_config* cfg = NULL;
    EXPECT(spx_config_create(&cfg) == SPX_OK);
    EXPECT(spx_config_set(cfg, "particles", "many") == SPX_ERR_PARAMETER);
    EXPECT(strlen(spx_last_error()) > 0);
    EXPECT(spx_config_set(cfg, "no_such_key", "1") == SPX_ERR_PARAMETER);
    EXPECT(spx_config_set(cfg, "gamma", "2") == SPX_OK);
    EXPECT(spx_config_validate(cfg) == SPX_ERR_PARAMETER);
    spx_config_free(cfg);

    snprintf(path, sizeof path, "%s/small.cfg", argv[1]);
    EXPECT(spx_config_load(path, &cfg) == SPX_OK);
    size_t need = spx_config_format(cfg, NULL, 0);
    char* text = malloc(need + 1);
    EXPECT(spx_config_format(cfg, text, need + 1) == need);
    EXPECT(strstr(text, "particles = 16") != NULL);
    free(text);
    spx_config* missing = NULL;
    EXPECT(spx_config_load("/nonexistent.cfg", &missing) == SPX_ERR_IO);
    EXPECT(missing == NULL);

    /* Images and frame-by-frame tracking. */
    spx_image* bad = NULL;
    EXPECT(spx_image_load("/nonexistent.png", &bad) == SPX_ERR_IO);
    EXPECT(bad == NULL);
    spx_image* frame = checker(64, 48);
    EXPECT(spx_image_width(frame) == 64);
    EXPECT(spx_image_height(frame) == 48);

    spx_tracker* tracker = NULL;
    EXPECT(spx_tracker_create(cfg, frame, (spx_box){10, 10, 0, 20}, &tracker) == SPX_ERR_INITIALIZATION);
    EXPECT(tracker == NULL);
    EXPECT(spx_tracker_create(cfg, frame, (spx_box){20, 14, 20, 20}, &tracker) == SPX_OK);
    EXPECT(spx_tracker_frame_index(tracker) == 1);
    spx_box box;
    spx_diagnostics diag;
    EXPECT(spx_tracker_step(tracker, frame, &box, &diag) == SPX_OK);
    EXPECT(diag.frame_index == 2);
    EXPECT(box.w > 0 && box.h > 0);
    EXPECT(spx_tracker_frame_index(tracker) == 2);
    snprintf(path, sizeof path, "%s/dict.bin", argv[1]);
    EXPECT(spx_tracker_save_dictionary(tracker, path, 1) == SPX_OK);
    EXPECT(spx_tracker_step(NULL, frame, &box, &diag) == SPX_ERR_INVALID_ARGUMENT);
    spx_tracker_free(tracker);
    spx_image_free(frame);

    /* Sequences and one-pass evaluation. */
    spx_sequence* seq = NULL;
    snprintf(path, sizeof path, "%s/bad", argv[1]);
    EXPECT(spx_sequence_load(path, &seq) == SPX_ERR_INGESTION);
    snprintf(path, sizeof path, "%s/seq", argv[1]);
    EXPECT(spx_sequence_load(path, &seq) == SPX_OK);
    EXPECT(spx_sequence_length(seq) == 5);
    EXPECT(strcmp(spx_sequence_name(seq), "seq") == 0);
    spx_box gt;
    EXPECT(spx_sequence_ground_truth(seq, 0, &gt) == SPX_OK);
    EXPECT(spx_sequence_ground_truth(seq, 5, &gt) == SPX_ERR_INVALID_ARGUMENT);

    spx_ope_result* result = NULL;
    EXPECT(spx_run_ope(cfg, seq, on_frame, NULL, &result) == SPX_OK);
    EXPECT(frames_seen == 5);
    EXPECT(spx_ope_result_length(result) == 5);
    double iou = 0, cle = 0;
    EXPECT(spx_ope_result_frame(result, 0, &box, &iou, &cle) == SPX_OK);
    EXPECT(box.x == gt.x && box.y == gt.y && box.w == gt.w && box.h == gt.h);
    EXPECT(iou == 1.0 && cle == 0.0);
    EXPECT(spx_ope_result_diagnostics(result, 3, &diag) == SPX_OK);
    EXPECT(diag.frame_index == 4);
    double auc = -1, p20 = -1, mean_iou = -1, seconds = -1;
    EXPECT(spx_ope_result_summary(result, &auc, &p20, &mean_iou, &seconds) == SPX_OK);
    EXPECT(auc >= 0 && auc <= 1 && p20 >= 0 && p20 <= 1 && seconds >= 0);

    char out[4096];
    snprintf(out, sizeof out, "%s/capi_out", argv[1]);
    EXPECT(spx_ope_result_write(result, seq, out, 0) == SPX_OK);
    char eval[4096];
    snprintf(eval, sizeof eval, "%s/capi_eval", argv[1]);
    double eval_auc = -1;
    EXPECT(spx_evaluate(out, eval, &eval_auc, NULL) == SPX_OK);
    EXPECT(eval_auc > auc - 1e-9 && eval_auc < auc + 1e-9);
    EXPECT(spx_evaluate("/nonexistent", eval, NULL, NULL) == SPX_ERR_INGESTION);

    spx_ope_result_free(result);
    spx_sequence_free(seq);
    spx_config_free(cfg);

    /* Freeing NULL handles is a no-op. */
    spx_config_free(NULL);
    spx_image_free(NULL);
    spx_tracker_free(NULL);
    spx_sequence_free(NULL);
    spx_ope_result_free(NULL);

    if (failures) {
        fprintf(stderr, "%d expectation(s) failed\n", failures);
        return 1;
    }
    printf("capi: all expectations met\n");
    return 0;
}
