#include "spx/media.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace spx {

ImageRGB load_image(const std::filesystem::path& path)
{
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty())
        throw Error(ErrorCode::Io, "cannot read image: " + path.string());
    if (bgr.depth() != CV_8U)
        throw Error(ErrorCode::Io, "unsupported pixel depth in " + path.string());

    ImageRGB img(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img.at(x, y, 0) = row[x][2] / 255.0;
            img.at(x, y, 1) = row[x][1] / 255.0;
            img.at(x, y, 2) = row[x][0] / 255.0;
        }
    }
    return img;
}

ImageRGB image_from_rgb8(int width, int height, std::span<const unsigned char> rgb)
{
    ImageRGB img(width, height);
    if (rgb.size() != img.pixel_count() * 3)
        throw Error(ErrorCode::InvalidArgument, "rgb buffer size does not match image dimensions");
    auto out = img.data();
    for (std::size_t i = 0; i < rgb.size(); ++i)
        out[i] = rgb[i] / 255.0;
    return img;
}

void save_image(const std::filesystem::path& path, const ImageRGB& img)
{
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c)
                row[x][2 - c] = cv::saturate_cast<unsigned char>(std::lround(img.at(x, y, c) * 255.0));
    }
    if (!cv::imwrite(path.string(), bgr))
        throw Error(ErrorCode::Io, "cannot write image: " + path.string());
}

Hsi rgb_to_hsi(double r, double g, double b)
{
    const double intensity = (r + g + b) / 3.0;
    if (intensity <= 0.0)
        return {0.0, 0.0, 0.0};

    const double lo = std::min({r, g, b});
    const double saturation = std::clamp(1.0 - lo / intensity, 0.0, 1.0);
    if (saturation <= 0.0)
        return {0.0, 0.0, intensity};

    const double num = 0.5 * ((r - g) + (r - b));
    const double den = std::sqrt((r - g) * (r - g) + (r - b) * (g - b));
    if (den <= 0.0)
        return {0.0, saturation, intensity};

    double theta = std::acos(std::clamp(num / den, -1.0, 1.0));
    if (b > g)
        theta = 2.0 * std::numbers::pi - theta;
    double hue = theta / (2.0 * std::numbers::pi);
    if (hue >= 1.0)
        hue = 0.0;
    return {hue, saturation, intensity};
}

ImageHSI rgb_to_hsi(const ImageRGB& img)
{
    ImageHSI out(img.width(), img.height());
    auto src = img.data();
    auto dst = out.data();
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        const Hsi v = rgb_to_hsi(src[3 * p], src[3 * p + 1], src[3 * p + 2]);
        dst[3 * p] = v.h;
        dst[3 * p + 1] = v.s;
        dst[3 * p + 2] = v.i;
    }
    return out;
}

void sample_bilinear(const ImageRGB& img, double fx, double fy, double out[3])
{
    fx = std::clamp(fx, 0.0, static_cast<double>(img.width() - 1));
    fy = std::clamp(fy, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double ax = fx - x0;
    const double ay = fy - y0;
    for (int c = 0; c < 3; ++c) {
        const double top = img.at(x0, y0, c) + ax * (img.at(x1, y0, c) - img.at(x0, y0, c));
        const double bottom = img.at(x0, y1, c) + ax * (img.at(x1, y1, c) - img.at(x0, y1, c));
        out[c] = top + ay * (bottom - top);
    }
}

Patch extract_template(const ImageRGB& frame, const AffineState& state, int out_w, int out_h)
{
    if (!is_finite(state))
        throw Error(ErrorCode::InvalidState, "affine state has non-finite parameters");
    if (state.scale <= 0.0 || state.aspect <= 0.0)
        throw Error(ErrorCode::InvalidState, "affine state needs positive scale and aspect");
    if (out_w < 1 || out_h < 1)
        throw Error(ErrorCode::Parameter, "template size must be at least 1x1");
    if (frame.empty())
        throw Error(ErrorCode::InvalidArgument, "empty frame");

    const double root = std::sqrt(state.aspect);
    const double sx = state.scale * root;
    const double sy = state.scale / root;
    const double c = std::cos(state.theta);
    const double s = std::sin(state.theta);
    // R * Shear * diag(sx, sy)
    const double a11 = c * sx;
    const double a12 = (c * state.skew - s) * sy;
    const double a21 = s * sx;
    const double a22 = (s * state.skew + c) * sy;

    const double cu = (out_w - 1) / 2.0;
    const double cv = (out_h - 1) / 2.0;

    Patch patch;
    patch.rgb = ImageRGB(out_w, out_h);
    patch.source_state = state;
    for (int v = 0; v < out_h; ++v) {
        const double pv = v - cv;
        for (int u = 0; u < out_w; ++u) {
            const double pu = u - cu;
            double px[3];
            sample_bilinear(frame, state.x + a11 * pu + a12 * pv, state.y + a21 * pu + a22 * pv, px);
            for (int ch = 0; ch < 3; ++ch)
                patch.rgb.at(u, v, ch) = px[ch];
        }
    }
    patch.hsi = rgb_to_hsi(patch.rgb);
    return patch;
}

} // namespace spx
