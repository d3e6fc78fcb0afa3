#include "spx/cues.hpp"

#include <algorithm>
#include <cmath>

namespace spx {

namespace {

void check_bins(int n_bins)
{
    if (n_bins < 1)
        throw Error(ErrorCode::Parameter, "histogram needs at least one bin");
}

void check_labels(const Patch& patch, const LabelMap& labels)
{
    if (labels.width != patch.width() || labels.height != patch.height())
        throw Error(ErrorCode::Parameter, "label map does not match patch size");
}

double normalized_coord(int v, int extent)
{
    return extent > 1 ? static_cast<double>(v) / (extent - 1) : 0.0;
}

// The eight cue values of pixel (x, y) in column order.
void pixel_cues(const Patch& patch, int x, int y, double out[kCueCount])
{
    for (int c = 0; c < 3; ++c) {
        out[CueH + c] = patch.hsi.at(x, y, c);
        out[CueR + c] = patch.rgb.at(x, y, c);
    }
    out[CueX] = normalized_coord(x, patch.width());
    out[CueY] = normalized_coord(y, patch.height());
}

} // namespace

int histogram_bin(double value, int n_bins)
{
    const int bin = static_cast<int>(std::floor(value * n_bins));
    return std::clamp(bin, 0, n_bins - 1);
}

HistVec channel_histogram(std::span<const double> values, int n_bins)
{
    check_bins(n_bins);
    if (values.empty())
        throw Error(ErrorCode::DegenerateRegion, "histogram of an empty region");
    HistVec f = HistVec::Zero(n_bins);
    for (double v : values)
        f[histogram_bin(v, n_bins)] += 1.0;
    return f / static_cast<double>(values.size());
}

FeatureMatrix superpixel_features(const Patch& patch, const LabelMap& labels, int region_id,
                                  int n_bins)
{
    check_bins(n_bins);
    check_labels(patch, labels);
    if (region_id < 0 || region_id >= labels.k)
        throw Error(ErrorCode::Parameter, "region id out of range");

    std::vector<double> channels[kCueCount];
    for (int y = 0; y < patch.height(); ++y) {
        for (int x = 0; x < patch.width(); ++x) {
            if (labels.at(x, y) != region_id)
                continue;
            double cues[kCueCount];
            pixel_cues(patch, x, y, cues);
            for (int m = 0; m < kCueCount; ++m)
                channels[m].push_back(cues[m]);
        }
    }

    FeatureMatrix fm(n_bins, kCueCount);
    for (int m = 0; m < kCueCount; ++m)
        fm.col(m) = channel_histogram(channels[m], n_bins);
    return fm;
}

std::vector<FeatureMatrix> all_superpixel_features(const Patch& patch, const LabelMap& labels,
                                                   int n_bins)
{
    check_bins(n_bins);
    check_labels(patch, labels);

    std::vector<FeatureMatrix> out(labels.k, FeatureMatrix::Zero(n_bins, kCueCount));
    std::vector<int> counts(labels.k, 0);
    for (int y = 0; y < patch.height(); ++y) {
        for (int x = 0; x < patch.width(); ++x) {
            const int l = labels.at(x, y);
            double cues[kCueCount];
            pixel_cues(patch, x, y, cues);
            for (int m = 0; m < kCueCount; ++m)
                out[l](histogram_bin(cues[m], n_bins), m) += 1.0;
            ++counts[l];
        }
    }
    for (int l = 0; l < labels.k; ++l) {
        if (counts[l] == 0)
            throw Error(ErrorCode::DegenerateRegion, "superpixel region is empty");
        out[l] /= static_cast<double>(counts[l]);
    }
    return out;
}

FeatureVector flatten(const FeatureMatrix& fm)
{
    return fm.reshaped();
}

FeatureMatrix unflatten(const FeatureVector& a, int n_bins)
{
    if (n_bins < 1 || a.size() % n_bins != 0)
        throw Error(ErrorCode::Parameter, "vector length is not a multiple of the bin count");
    return a.reshaped(n_bins, a.size() / n_bins);
}

} // namespace spx
