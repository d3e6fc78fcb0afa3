// Command-line front end. Links only the C interface.
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "spx/spxtrack.h"

namespace {

int report(spx_status status, const char* context)
{
    std::fprintf(stderr, "spxtrack: %s: %s (%s)\n", context, spx_last_error(),
                 spx_status_string(status));
    return static_cast<int>(status);
}

void print_progress(int frame, spx_box box, double iou, void* user)
{
    if (*static_cast<bool*>(user))
        std::fprintf(stderr, "frame %d  box %.1f %.1f %.1f %.1f  iou %.3f\n", frame, box.x, box.y,
                     box.w, box.h, iou);
}

int run_track(const std::string& seq_dir, const std::string& config_path, const std::string& out_dir,
              const std::string& seed, bool overlay, bool verbose)
{
    spx_config* config = nullptr;
    spx_status st = config_path.empty() ? spx_config_create(&config)
                                        : spx_config_load(config_path.c_str(), &config);
    if (st != SPX_OK)
        return report(st, "config");
    if (!seed.empty() && (st = spx_config_set(config, "rng_seed", seed.c_str())) != SPX_OK) {
        spx_config_free(config);
        return report(st, "--seed");
    }

    spx_sequence* seq = nullptr;
    if ((st = spx_sequence_load(seq_dir.c_str(), &seq)) != SPX_OK) {
        spx_config_free(config);
        return report(st, "sequence");
    }

    spx_ope_result* result = nullptr;
    st = spx_run_ope(config, seq, print_progress, &verbose, &result);
    if (st == SPX_OK)
        st = spx_ope_result_write(result, seq, out_dir.c_str(), overlay ? 1 : 0);

    int code = 0;
    if (st != SPX_OK) {
        code = report(st, "track");
    } else {
        double auc = 0.0, p20 = 0.0, mean_iou = 0.0, seconds = 0.0;
        spx_ope_result_summary(result, &auc, &p20, &mean_iou, &seconds);
        std::printf("%s: %zu frames  auc %.4f  precision@20 %.4f  mean iou %.4f  %.2f s\n",
                    spx_sequence_name(seq), spx_ope_result_length(result), auc, p20, mean_iou,
                    seconds);
    }
    spx_ope_result_free(result);
    spx_sequence_free(seq);
    spx_config_free(config);
    return code;
}

int run_eval(const std::string& results_dir, const std::string& out_dir)
{
    double auc = 0.0, p20 = 0.0;
    const spx_status st = spx_evaluate(results_dir.c_str(), out_dir.c_str(), &auc, &p20);
    if (st != SPX_OK)
        return report(st, "eval");
    std::printf("auc %.4f  precision@20 %.4f\n", auc, p20);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Superpixel tensor tracker: one-pass tracking and evaluation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(spx_version()));

    std::string seq_dir, config_path, out_dir, seed;
    bool overlay = false, verbose = false;
    auto* track = app.add_subcommand("track", "Run one-pass evaluation on an OTB-style sequence");
    track->add_option("--seq", seq_dir, "Sequence directory (img/ + groundtruth_rect.txt)")
        ->required()
        ->check(CLI::ExistingDirectory);
    track->add_option("--config", config_path, "Tracker config file (key = value)");
    track->add_option("--out", out_dir, "Output directory")->required();
    track->add_option("--seed", seed, "Override rng_seed");
    track->add_flag("--overlay", overlay, "Write PNG overlays of predicted and ground-truth boxes");
    track->add_flag("-v,--verbose", verbose, "Print per-frame progress");

    std::string results_dir, eval_out;
    auto* eval = app.add_subcommand("eval", "Compute success/precision curves from result files");
    eval->add_option("--results", results_dir, "Directory holding results.csv or per-sequence subdirectories")
        ->required();
    eval->add_option("--out", eval_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*track)
        return run_track(seq_dir, config_path, out_dir, seed, overlay, verbose);
    return run_eval(results_dir, eval_out);
}
