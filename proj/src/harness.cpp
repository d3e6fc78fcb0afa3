#include "spx/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "json.hpp"
#include "spx/media.hpp"

namespace spx {

namespace fs = std::filesystem;

namespace {

bool is_image_file(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".ppm";
}

// Frames sort by the integer in their stem; non-numeric stems sort after,
// by name.
bool frame_order(const fs::path& a, const fs::path& b)
{
    const std::string sa = a.stem().string();
    const std::string sb = b.stem().string();
    long long na = 0, nb = 0;
    const bool ia = !sa.empty() && std::from_chars(sa.data(), sa.data() + sa.size(), na).ptr == sa.data() + sa.size();
    const bool ib = !sb.empty() && std::from_chars(sb.data(), sb.data() + sb.size(), nb).ptr == sb.data() + sb.size();
    if (ia && ib && na != nb)
        return na < nb;
    if (ia != ib)
        return ia;
    return sa < sb;
}

std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<double> split_numbers(const std::string& text)
{
    std::vector<double> values;
    std::string token;
    auto flush = [&] {
        if (token.empty())
            return;
        double v = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size())
            throw Error(ErrorCode::Ingestion, "not a number: '" + token + "'");
        values.push_back(v);
        token.clear();
    };
    for (char c : text) {
        if (c == ',' || c == '\t' || c == ' ' || c == '\r' || c == '\n')
            flush();
        else
            token.push_back(c);
    }
    flush();
    return values;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

void write_curve_csv(const fs::path& path, const EvalCurve& curve)
{
    std::ofstream out(path);
    if (!out)
        throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
    out << "threshold,value\n";
    for (std::size_t i = 0; i < curve.values.size(); ++i)
        out << format_double(curve.thresholds[i]) << ',' << format_double(curve.values[i]) << '\n';
}

void draw_box(cv::Mat& img, const BoundingBox& b, const cv::Scalar& color)
{
    cv::rectangle(img, cv::Point2d(b.x, b.y), cv::Point2d(b.x + b.w, b.y + b.h), color, 2);
}

} // namespace

BoundingBox parse_box_line(const std::string& line)
{
    const auto values = split_numbers(line);
    if (values.size() != 4)
        throw Error(ErrorCode::Ingestion, "expected 4 values in box row '" + line + "'");
    return {values[0], values[1], values[2], values[3]};
}

Sequence load_sequence(const fs::path& dir)
{
    const fs::path img_dir = dir / "img";
    const fs::path gt_path = dir / "groundtruth_rect.txt";
    if (!fs::is_directory(img_dir))
        throw Error(ErrorCode::Ingestion, "missing frame directory: " + img_dir.string());
    if (!fs::is_regular_file(gt_path))
        throw Error(ErrorCode::Ingestion, "missing ground truth file: " + gt_path.string());

    Sequence seq;
    seq.name = dir.filename().empty() ? dir.parent_path().filename().string()
                                      : dir.filename().string();
    for (const auto& entry : fs::directory_iterator(img_dir))
        if (entry.is_regular_file() && is_image_file(entry.path()))
            seq.frames.push_back(entry.path());
    std::sort(seq.frames.begin(), seq.frames.end(), frame_order);

    std::ifstream in(gt_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        try {
            seq.ground_truth.push_back(parse_box_line(line));
        } catch (const Error& e) {
            throw Error(ErrorCode::Ingestion,
                        gt_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }

    if (seq.frames.size() != seq.ground_truth.size())
        throw Error(ErrorCode::Ingestion,
                    "sequence " + seq.name + " has " + std::to_string(seq.frames.size()) +
                        " frames but " + std::to_string(seq.ground_truth.size()) +
                        " ground-truth rows");
    if (seq.frames.size() < 2)
        throw Error(ErrorCode::Ingestion, "sequence " + seq.name + " needs at least 2 frames");
    return seq;
}

double iou(const BoundingBox& a, const BoundingBox& b)
{
    const double iw = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
    const double ih = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
    if (iw <= 0.0 || ih <= 0.0)
        return 0.0;
    const double inter = iw * ih;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

double center_error(const BoundingBox& a, const BoundingBox& b)
{
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

EvalCurve success_curve(std::span<const double> ious)
{
    if (ious.empty())
        throw Error(ErrorCode::InvalidArgument, "success curve of an empty run");
    EvalCurve curve;
    for (int i = 0; i <= 50; ++i) {
        const double tau = i / 50.0;
        const auto hits = std::count_if(ious.begin(), ious.end(), [tau](double v) { return v > tau; });
        curve.thresholds.push_back(tau);
        curve.values.push_back(static_cast<double>(hits) / ious.size());
    }
    double sum = 0.0;
    for (double v : curve.values)
        sum += v;
    curve.auc = sum / curve.values.size();
    return curve;
}

EvalCurve precision_curve(std::span<const double> errors)
{
    if (errors.empty())
        throw Error(ErrorCode::InvalidArgument, "precision curve of an empty run");
    EvalCurve curve;
    for (int tau = 0; tau <= 50; ++tau) {
        const auto hits = std::count_if(errors.begin(), errors.end(),
                                        [tau](double e) { return e <= tau; });
        curve.thresholds.push_back(tau);
        curve.values.push_back(static_cast<double>(hits) / errors.size());
    }
    double sum = 0.0;
    for (double v : curve.values)
        sum += v;
    curve.auc = sum / curve.values.size();
    return curve;
}

double precision_at(const EvalCurve& precision, int threshold_px)
{
    for (std::size_t i = 0; i < precision.thresholds.size(); ++i)
        if (precision.thresholds[i] == threshold_px)
            return precision.values[i];
    throw Error(ErrorCode::InvalidArgument, "threshold not sampled by the precision curve");
}

std::vector<double> OpeResult::ious() const
{
    std::vector<double> out;
    for (const auto& f : frames)
        out.push_back(f.iou);
    return out;
}

std::vector<double> OpeResult::center_errors() const
{
    std::vector<double> out;
    for (const auto& f : frames)
        out.push_back(f.cle);
    return out;
}

OpeResult run_ope(const TrackerConfig& config, const Sequence& seq, const ProgressFn& progress)
{
    if (seq.frames.empty() || seq.frames.size() != seq.ground_truth.size())
        throw Error(ErrorCode::Ingestion, "sequence frames and ground truth disagree");

    OpeResult result;
    result.sequence = seq.name;
    const auto start = std::chrono::steady_clock::now();

    auto frame_error = [](std::size_t index, const Error& e) {
        return Error(e.code(), "frame " + std::to_string(index + 1) + ": " + e.what());
    };

    TrackerState state;
    try {
        const ImageRGB first = load_image(seq.frames[0]);
        state = init(first, seq.ground_truth[0], config);
    } catch (const Error& e) {
        throw frame_error(0, e);
    }

    FrameRecord first;
    first.index = 1;
    first.box = seq.ground_truth[0];
    first.iou = iou(first.box, seq.ground_truth[0]);
    first.cle = center_error(first.box, seq.ground_truth[0]);
    result.frames.push_back(first);
    if (progress)
        progress(first);

    for (std::size_t f = 1; f < seq.frames.size(); ++f) {
        FrameRecord rec;
        rec.index = static_cast<int>(f + 1);
        try {
            const ImageRGB frame = load_image(seq.frames[f]);
            const StepResult out = step(state, frame);
            rec.box = out.box;
            rec.diagnostics = out.diagnostics;
        } catch (const TrackingFailure& e) {
            throw TrackingFailure("frame " + std::to_string(f + 1) + ": " + e.what(),
                                  e.last_good_state());
        } catch (const Error& e) {
            throw frame_error(f, e);
        }
        rec.iou = iou(rec.box, seq.ground_truth[f]);
        rec.cle = center_error(rec.box, seq.ground_truth[f]);
        result.frames.push_back(rec);
        if (progress)
            progress(rec);
    }

    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

void write_results(const fs::path& out_dir, const OpeResult& result, const Sequence& seq,
                   bool overlay)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create output directory: " + out_dir.string());

    {
        std::ofstream out(out_dir / "results.csv");
        if (!out)
            throw Error(ErrorCode::Io, "cannot write results.csv in " + out_dir.string());
        out << "frame,x,y,w,h,iou,cle\n";
        for (const auto& f : result.frames)
            out << f.index << ',' << format_double(f.box.x) << ',' << format_double(f.box.y) << ','
                << format_double(f.box.w) << ',' << format_double(f.box.h) << ','
                << format_double(f.iou) << ',' << format_double(f.cle) << '\n';
    }
    {
        std::ofstream out(out_dir / "diagnostics.csv");
        if (!out)
            throw Error(ErrorCode::Io, "cannot write diagnostics.csv in " + out_dir.string());
        out << "frame,best_loglik,re_pos,re_neg,gate_loglik,accepted,positive_updated,failed_particles\n";
        for (const auto& f : result.frames) {
            const Diagnostics& d = f.diagnostics;
            out << f.index << ',' << format_double(d.best_loglik) << ',' << format_double(d.re_pos)
                << ',' << (d.re_neg ? format_double(*d.re_neg) : std::string()) << ','
                << format_double(d.gate_loglik) << ',' << int(d.accepted) << ','
                << int(d.positive_updated) << ',' << d.failed_particles << '\n';
        }
    }

    const auto ious = result.ious();
    const auto errors = result.center_errors();
    const EvalCurve success = success_curve(ious);
    const EvalCurve precision = precision_curve(errors);
    double mean_iou = 0.0;
    for (double v : ious)
        mean_iou += v;
    mean_iou /= ious.size();

    nlohmann::json summary;
    summary["sequence"] = result.sequence;
    summary["frames"] = result.frames.size();
    summary["auc"] = success.auc;
    summary["precision_at_20"] = precision_at(precision);
    summary["mean_iou"] = mean_iou;
    summary["runtime_per_frame_ms"] = 1000.0 * result.seconds / result.frames.size();
    {
        std::ofstream out(out_dir / "summary.json");
        if (!out)
            throw Error(ErrorCode::Io, "cannot write summary.json in " + out_dir.string());
        out << summary.dump(2) << '\n';
    }

    if (!overlay)
        return;
    const fs::path dir = out_dir / "overlays";
    fs::create_directories(dir, ec);
    for (std::size_t i = 0; i < result.frames.size() && i < seq.frames.size(); ++i) {
        cv::Mat img = cv::imread(seq.frames[i].string(), cv::IMREAD_COLOR);
        if (img.empty())
            throw Error(ErrorCode::Io, "cannot read frame for overlay: " + seq.frames[i].string());
        draw_box(img, seq.ground_truth[i], cv::Scalar(0, 255, 255));
        draw_box(img, result.frames[i].box, cv::Scalar(255, 255, 0));
        char name[32];
        std::snprintf(name, sizeof name, "%04d.png", result.frames[i].index);
        if (!cv::imwrite((dir / name).string(), img))
            throw Error(ErrorCode::Io, "cannot write overlay " + (dir / name).string());
    }
}

EvalSummary evaluate_results(const fs::path& results_dir, const fs::path& out_dir)
{
    std::vector<fs::path> files;
    if (fs::is_regular_file(results_dir / "results.csv")) {
        files.push_back(results_dir / "results.csv");
    } else if (fs::is_directory(results_dir)) {
        for (const auto& entry : fs::directory_iterator(results_dir))
            if (entry.is_directory() && fs::is_regular_file(entry.path() / "results.csv"))
                files.push_back(entry.path() / "results.csv");
        std::sort(files.begin(), files.end());
    }
    if (files.empty())
        throw Error(ErrorCode::Ingestion, "no results.csv found under " + results_dir.string());

    EvalSummary summary;
    std::vector<double> ious, errors;
    nlohmann::json per_sequence = nlohmann::json::array();
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        std::getline(in, line);
        if (trim(line) != "frame,x,y,w,h,iou,cle")
            throw Error(ErrorCode::Ingestion, "unexpected header in " + file.string());
        std::vector<double> seq_ious, seq_errors;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty())
                continue;
            std::vector<double> v;
            try {
                v = split_numbers(line);
            } catch (const Error& e) {
                throw Error(ErrorCode::Ingestion, file.string() + ":" + std::to_string(line_no) + ": " + e.what());
            }
            if (v.size() != 7)
                throw Error(ErrorCode::Ingestion,
                            file.string() + ":" + std::to_string(line_no) + ": expected 7 columns");
            seq_ious.push_back(v[5]);
            seq_errors.push_back(v[6]);
        }
        if (seq_ious.empty())
            throw Error(ErrorCode::Ingestion, "no frames in " + file.string());
        const std::string name = file.parent_path().filename().string();
        summary.sequences.push_back(name);
        per_sequence.push_back({{"sequence", name},
                                {"frames", seq_ious.size()},
                                {"auc", success_curve(seq_ious).auc},
                                {"precision_at_20", precision_at(precision_curve(seq_errors))}});
        ious.insert(ious.end(), seq_ious.begin(), seq_ious.end());
        errors.insert(errors.end(), seq_errors.begin(), seq_errors.end());
    }

    summary.success = success_curve(ious);
    summary.precision = precision_curve(errors);
    summary.frames = ious.size();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw Error(ErrorCode::Io, "cannot create output directory: " + out_dir.string());
    write_curve_csv(out_dir / "success_curve.csv", summary.success);
    write_curve_csv(out_dir / "precision_curve.csv", summary.precision);

    nlohmann::json j;
    j["frames"] = summary.frames;
    j["auc"] = summary.success.auc;
    j["precision_at_20"] = precision_at(summary.precision);
    j["sequences"] = per_sequence;
    std::ofstream out(out_dir / "eval_summary.json");
    if (!out)
        throw Error(ErrorCode::Io, "cannot write eval_summary.json in " + out_dir.string());
    out << j.dump(2) << '\n';
    return summary;
}

} // namespace spx
