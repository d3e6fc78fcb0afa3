#include "spx/snic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace spx {

std::vector<SeedPoint> seed_grid(int width, int height, int k)
{
    if (k < 1 || static_cast<long long>(k) > static_cast<long long>(width) * height)
        throw Error(ErrorCode::Parameter, "superpixel count must lie in [1, pixel count]");

    // Rows must be numerous enough that no row holds more seeds than columns.
    const int min_rows = (k + width - 1) / width;
    int rows = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k) * height / width)));
    rows = std::clamp(rows, std::max(1, min_rows), std::min(height, k));

    std::vector<SeedPoint> seeds;
    seeds.reserve(k);
    const int base = k / rows;
    const int extra = k % rows;
    for (int r = 0; r < rows; ++r) {
        // Spread the remainder over the middle rows.
        const int count = base + ((r * extra) / rows != ((r + 1) * extra) / rows ? 1 : 0);
        const int y = static_cast<int>(std::floor((r + 0.5) * height / rows));
        for (int j = 0; j < count; ++j) {
            const int x = static_cast<int>(std::floor((j + 0.5) * width / count));
            seeds.push_back({x, y});
        }
    }
    return seeds;
}

namespace {

struct QueueEntry {
    double dist;
    std::uint64_t order;
    int pixel;
    int label;
};

struct LaterFirst {
    bool operator()(const QueueEntry& a, const QueueEntry& b) const
    {
        if (a.dist != b.dist)
            return a.dist > b.dist;
        return a.order > b.order;
    }
};

struct Accumulator {
    double sx = 0.0, sy = 0.0;
    std::array<double, 3> sc{};
    int n = 0;
};

} // namespace

LabelMap segment(const ImageRGB& rgb, int k, double compactness)
{
    if (!(compactness >= 0.0))
        throw Error(ErrorCode::Parameter, "compactness must be nonnegative");
    const int w = rgb.width();
    const int h = rgb.height();
    const auto seeds = seed_grid(w, h, k);

    const double step = std::sqrt(static_cast<double>(w) * h / k);
    const double spatial_weight = (compactness / step) * (compactness / step);

    LabelMap out;
    out.width = w;
    out.height = h;
    out.k = k;
    out.labels.assign(static_cast<std::size_t>(w) * h, -1);

    std::vector<Accumulator> acc(k);
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, LaterFirst> queue;
    std::uint64_t order = 0;
    for (int i = 0; i < k; ++i)
        queue.push({0.0, order++, seeds[i].y * w + seeds[i].x, i});

    auto pixels = rgb.data();
    constexpr int dx[4] = {-1, 1, 0, 0};
    constexpr int dy[4] = {0, 0, -1, 1};

    while (!queue.empty()) {
        const QueueEntry e = queue.top();
        queue.pop();
        if (out.labels[e.pixel] != -1)
            continue;
        out.labels[e.pixel] = e.label;

        const int px = e.pixel % w;
        const int py = e.pixel / w;
        Accumulator& a = acc[e.label];
        a.sx += px;
        a.sy += py;
        for (int c = 0; c < 3; ++c)
            a.sc[c] += pixels[3 * e.pixel + c];
        ++a.n;

        const double cx = a.sx / a.n;
        const double cy = a.sy / a.n;
        const double cr = a.sc[0] / a.n, cg = a.sc[1] / a.n, cb = a.sc[2] / a.n;

        for (int d = 0; d < 4; ++d) {
            const int nx = px + dx[d];
            const int ny = py + dy[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                continue;
            const int np = ny * w + nx;
            if (out.labels[np] != -1)
                continue;
            const double dr = pixels[3 * np] - cr;
            const double dg = pixels[3 * np + 1] - cg;
            const double db = pixels[3 * np + 2] - cb;
            const double sxd = nx - cx;
            const double syd = ny - cy;
            const double dist = std::sqrt(dr * dr + dg * dg + db * db +
                                          spatial_weight * (sxd * sxd + syd * syd));
            queue.push({dist, order++, np, e.label});
        }
    }

    // Seeds are distinct pixels popped ahead of everything else, so every
    // region owns at least its seed.
    out.regions.resize(k);
    for (int i = 0; i < k; ++i) {
        if (acc[i].n == 0)
            throw Error(ErrorCode::Internal, "superpixel region left empty");
        RegionStats& r = out.regions[i];
        r.size = acc[i].n;
        r.mean_x = acc[i].sx / acc[i].n;
        r.mean_y = acc[i].sy / acc[i].n;
        for (int c = 0; c < 3; ++c)
            r.mean_color[c] = acc[i].sc[c] / acc[i].n;
    }
    return out;
}

LabelMap segment(const Patch& patch, int k, double compactness)
{
    return segment(patch.rgb, k, compactness);
}

void write_label_map_png(const std::filesystem::path& path, const LabelMap& labels)
{
    cv::Mat img(labels.height, labels.width, CV_16UC1);
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            img.at<std::uint16_t>(y, x) = static_cast<std::uint16_t>(labels.at(x, y));
    if (!cv::imwrite(path.string(), img))
        throw Error(ErrorCode::Io, "cannot write label map: " + path.string());
}

void write_boundary_overlay_png(const std::filesystem::path& path, const ImageRGB& rgb,
                                const LabelMap& labels)
{
    if (rgb.width() != labels.width || rgb.height() != labels.height)
        throw Error(ErrorCode::Parameter, "label map does not match image size");
    ImageRGB overlay = rgb;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const int l = labels.at(x, y);
            const bool edge = (x + 1 < labels.width && labels.at(x + 1, y) != l) ||
                              (y + 1 < labels.height && labels.at(x, y + 1) != l);
            if (edge) {
                overlay.at(x, y, 0) = 1.0;
                overlay.at(x, y, 1) = 0.0;
                overlay.at(x, y, 2) = 0.0;
            }
        }
    }
    save_image(path, overlay);
}

} // namespace spx
