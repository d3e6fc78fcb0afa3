#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spx/geometry.hpp"
#include "spx/tracker.hpp"

namespace spx {

// OTB-style sequence: <dir>/img/NNNN.jpg frames plus <dir>/groundtruth_rect.txt.
struct Sequence {
    std::string name;
    std::vector<std::filesystem::path> frames;
    std::vector<BoundingBox> ground_truth;
};

Sequence load_sequence(const std::filesystem::path& dir);

// Parses "x,y,w,h" with comma, tab or space separators.
BoundingBox parse_box_line(const std::string& line);

double iou(const BoundingBox& a, const BoundingBox& b);
double center_error(const BoundingBox& a, const BoundingBox& b);

struct EvalCurve {
    std::vector<double> thresholds;
    std::vector<double> values;
    // Mean of the sampled values.
    double auc = 0.0;
};

// 51 uniform thresholds on [0, 1]; value = fraction of frames with
// iou > threshold.
EvalCurve success_curve(std::span<const double> ious);

// Thresholds 0..50 px; value = fraction of frames with error <= threshold.
EvalCurve precision_curve(std::span<const double> errors);

inline constexpr int kPrecisionReportThreshold = 20;
double precision_at(const EvalCurve& precision, int threshold_px = kPrecisionReportThreshold);

struct FrameRecord {
    int index = 0; // 1-based frame number
    BoundingBox box;
    double iou = 0.0;
    double cle = 0.0;
    Diagnostics diagnostics;
};

struct OpeResult {
    std::string sequence;
    std::vector<FrameRecord> frames;
    double seconds = 0.0;

    std::vector<double> ious() const;
    std::vector<double> center_errors() const;
};

using ProgressFn = std::function<void(const FrameRecord&)>;

// One-pass evaluation: initialize from the first ground-truth box and step
// through the rest of the sequence without restarts.
OpeResult run_ope(const TrackerConfig& config, const Sequence& seq, const ProgressFn& progress = {});

// Writes results.csv (frame,x,y,w,h,iou,cle), diagnostics.csv and
// summary.json; with `overlay` also overlays/NNNN.png.
void write_results(const std::filesystem::path& out_dir, const OpeResult& result,
                   const Sequence& seq, bool overlay);

struct EvalSummary {
    EvalCurve success;
    EvalCurve precision;
    std::size_t frames = 0;
    std::vector<std::string> sequences;
};

// Reads results.csv from `results_dir` (or from each of its subdirectories),
// pools all frames and writes success_curve.csv, precision_curve.csv and
// eval_summary.json into out_dir.
EvalSummary evaluate_results(const std::filesystem::path& results_dir,
                             const std::filesystem::path& out_dir);

// Flat "key = value" config mirroring TrackerConfig field names; '#' starts
// a comment. noise and ranks take comma-separated lists.
TrackerConfig parse_config(const std::string& text);
TrackerConfig load_config(const std::filesystem::path& path);
void set_config_value(TrackerConfig& config, const std::string& key, const std::string& value);
std::string format_config(const TrackerConfig& config);

} // namespace spx
