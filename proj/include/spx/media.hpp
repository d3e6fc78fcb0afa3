#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "spx/error.hpp"
#include "spx/geometry.hpp"

namespace spx {

// Three-channel image with interleaved real samples.
template <typename Tag>
class Image3 {
public:
    Image3() = default;
    Image3(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const { return data_.empty(); }

    double& at(int x, int y, int c) { return data_[index(x, y) + c]; }
    double at(int x, int y, int c) const { return data_[index(x, y) + c]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    bool operator==(const Image3&) const = default;

private:
    std::size_t index(int x, int y) const
    {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

template <typename Tag>
Image3<Tag>::Image3(int width, int height) : width_(width), height_(height)
{
    if (width <= 0 || height <= 0)
        throw Error(ErrorCode::Parameter, "image dimensions must be positive");
    data_.assign(static_cast<std::size_t>(width) * height * 3, 0.0);
}

struct RgbTag {};
struct HsiTag {};

// Channels (r, g, b), each in [0, 1].
using ImageRGB = Image3<RgbTag>;
// Channels (h, s, i): hue normalized to [0, 1), saturation and intensity in [0, 1].
using ImageHSI = Image3<HsiTag>;

struct Hsi {
    double h;
    double s;
    double i;
};

struct Patch {
    ImageRGB rgb;
    ImageHSI hsi;
    AffineState source_state;

    int width() const { return rgb.width(); }
    int height() const { return rgb.height(); }
};

// Reads an 8-bit raster (PNG, JPEG, PPM, ...) and scales channels into [0, 1].
ImageRGB load_image(const std::filesystem::path& path);

// Builds an image from interleaved 8-bit RGB samples.
ImageRGB image_from_rgb8(int width, int height, std::span<const unsigned char> rgb);

void save_image(const std::filesystem::path& path, const ImageRGB& img);

Hsi rgb_to_hsi(double r, double g, double b);
ImageHSI rgb_to_hsi(const ImageRGB& img);

// Bilinear sample with coordinates clamped to the frame border.
void sample_bilinear(const ImageRGB& img, double fx, double fy, double out[3]);

// Warps the frame under `state` into an out_w x out_h patch. Output sample
// (u, v) is taken from frame position
//   (x, y) + R(theta) * [[1, skew], [0, 1]] * diag(scale*sqrt(aspect), scale/sqrt(aspect)) * (u - cu, v - cv)
// with (cu, cv) the patch center.
Patch extract_template(const ImageRGB& frame, const AffineState& state, int out_w, int out_h);

} // namespace spx
