#include <doctest.h>

#include <filesystem>
#include <random>

#include <opencv2/imgcodecs.hpp>

#include "oracles.hpp"
#include "spx/error.hpp"
#include "spx/geometry.hpp"
#include "spx/media.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* name)
{
    const fs::path dir = fs::temp_directory_path() / "spx_unit" / name;
    fs::create_directories(dir);
    return dir;
}

void write_png(const fs::path& path, const cv::Mat& bgr)
{
    REQUIRE(cv::imwrite(path.string(), bgr));
}

} // namespace

TEST_SUITE("media")
{
    TEST_CASE("load normalizes 8-bit values")
    {
        const auto dir = temp_dir("load");
        write_png(dir / "white.png", cv::Mat(1, 1, CV_8UC3, cv::Scalar(255, 255, 255)));
        write_png(dir / "black.png", cv::Mat(1, 1, CV_8UC3, cv::Scalar(0, 0, 0)));

        const auto white = spx::load_image(dir / "white.png");
        REQUIRE(white.width() == 1);
        REQUIRE(white.height() == 1);
        for (int c = 0; c < 3; ++c)
            CHECK(white.at(0, 0, c) == 1.0);
        const auto black = spx::load_image(dir / "black.png");
        for (int c = 0; c < 3; ++c)
            CHECK(black.at(0, 0, c) == 0.0);
    }

    TEST_CASE("checkerboard matches a reference decode")
    {
        const auto dir = temp_dir("checker");
        cv::Mat bgr(4, 4, CV_8UC3);
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x)
                bgr.at<cv::Vec3b>(y, x) = (x + y) % 2 ? cv::Vec3b(10, 200, 30) : cv::Vec3b(250, 5, 120);
        write_png(dir / "board.png", bgr);

        // Reference: decode without any library conversion and swap channels by hand.
        const cv::Mat ref = cv::imread((dir / "board.png").string(), cv::IMREAD_UNCHANGED);
        REQUIRE(ref.channels() == 3);
        const auto img = spx::load_image(dir / "board.png");
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) {
                const auto px = ref.at<cv::Vec3b>(y, x);
                CHECK(img.at(x, y, 0) == px[2] / 255.0);
                CHECK(img.at(x, y, 1) == px[1] / 255.0);
                CHECK(img.at(x, y, 2) == px[0] / 255.0);
            }
    }

    TEST_CASE("unreadable file is an IO error naming the path")
    {
        try {
            spx::load_image("/nonexistent/frame.png");
            FAIL("expected an error");
        } catch (const spx::Error& e) {
            CHECK(e.code() == spx::ErrorCode::Io);
            CHECK(std::string(e.what()).find("/nonexistent/frame.png") != std::string::npos);
        }
    }

    TEST_CASE("hsi of pure red and gray")
    {
        const auto red = spx::rgb_to_hsi(1.0, 0.0, 0.0);
        CHECK(red.h == doctest::Approx(0.0));
        CHECK(red.s == doctest::Approx(1.0));
        CHECK(red.i == doctest::Approx(1.0 / 3.0));

        const auto gray = spx::rgb_to_hsi(0.5, 0.5, 0.5);
        CHECK(gray.h == 0.0);
        CHECK(gray.s == 0.0);
        CHECK(gray.i == doctest::Approx(0.5));

        const auto black = spx::rgb_to_hsi(0.0, 0.0, 0.0);
        CHECK(black.h == 0.0);
        CHECK(black.s == 0.0);
        CHECK(black.i == 0.0);
    }

    TEST_CASE("hsi agrees with the scalar oracle and stays in range")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        spx::ImageRGB img(40, 25);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    img.at(x, y, c) = u(rng);
        const auto hsi = spx::rgb_to_hsi(img);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) {
                const auto want = oracle::hsi(img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2));
                CHECK(std::abs(hsi.at(x, y, 0) - want.h) <= 1e-12);
                CHECK(std::abs(hsi.at(x, y, 1) - want.s) <= 1e-12);
                CHECK(std::abs(hsi.at(x, y, 2) - want.i) <= 1e-12);
                CHECK(hsi.at(x, y, 0) >= 0.0);
                CHECK(hsi.at(x, y, 0) < 1.0);
                CHECK(hsi.at(x, y, 1) >= 0.0);
                CHECK(hsi.at(x, y, 1) <= 1.0);
                CHECK(hsi.at(x, y, 2) >= 0.0);
                CHECK(hsi.at(x, y, 2) <= 1.0);
            }
    }

    TEST_CASE("identity warp reproduces the frame")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        spx::ImageRGB frame(32, 32);
        for (double& v : frame.data())
            v = u(rng);
        const auto state = spx::state_from_box({0, 0, 32, 32}, 32, 32);
        CHECK(state.scale == 1.0);
        const auto patch = spx::extract_template(frame, state, 32, 32);
        CHECK(patch.rgb == frame);
    }

    TEST_CASE("unit translation shifts by one column")
    {
        spx::ImageRGB frame(40, 20);
        for (int y = 0; y < 20; ++y)
            for (int x = 0; x < 40; ++x)
                for (int c = 0; c < 3; ++c)
                    frame.at(x, y, c) = (x + 0.5 * y + c) / 100.0;
        auto state = spx::state_from_box({4, 2, 16, 16}, 16, 16);
        const auto base = spx::extract_template(frame, state, 16, 16);
        state.x += 1.0;
        const auto moved = spx::extract_template(frame, state, 16, 16);
        for (int v = 0; v < 16; ++v)
            for (int u = 0; u < 16; ++u)
                for (int c = 0; c < 3; ++c) {
                    CHECK(moved.rgb.at(u, v, c) == doctest::Approx(frame.at(u + 5, v + 2, c)).epsilon(1e-12));
                    if (u < 15)
                        CHECK(moved.rgb.at(u, v, c) == doctest::Approx(base.rgb.at(u + 1, v, c)).epsilon(1e-12));
                }
    }

    TEST_CASE("constant image under scale and rotation stays constant")
    {
        spx::ImageRGB frame(30, 30);
        for (int y = 0; y < 30; ++y)
            for (int x = 0; x < 30; ++x) {
                frame.at(x, y, 0) = 0.2;
                frame.at(x, y, 1) = 0.7;
                frame.at(x, y, 2) = 0.4;
            }
        spx::AffineState state{15, 15, 0.3, 2.0, 1.4, 0.1};
        const auto patch = spx::extract_template(frame, state, 32, 24);
        CHECK(patch.width() == 32);
        CHECK(patch.height() == 24);
        for (int v = 0; v < 24; ++v)
            for (int u = 0; u < 32; ++u) {
                CHECK(patch.rgb.at(u, v, 0) == doctest::Approx(0.2));
                CHECK(patch.rgb.at(u, v, 1) == doctest::Approx(0.7));
                CHECK(patch.rgb.at(u, v, 2) == doctest::Approx(0.4));
            }
    }

    TEST_CASE("output size is fixed and far samples clamp to the border")
    {
        spx::ImageRGB frame(8, 8);
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x)
                frame.at(x, y, 0) = x / 7.0;
        spx::AffineState state{1000, 4, 0, 0.5, 1, 0};
        const auto patch = spx::extract_template(frame, state, 5, 7);
        CHECK(patch.width() == 5);
        CHECK(patch.height() == 7);
        CHECK(patch.rgb.at(2, 3, 0) == 1.0);
    }

    TEST_CASE("non-finite or nonpositive states are rejected")
    {
        spx::ImageRGB frame(8, 8);
        spx::AffineState bad{std::nan(""), 0, 0, 1, 1, 0};
        CHECK_THROWS_AS(spx::extract_template(frame, bad, 4, 4), spx::Error);
        try {
            spx::extract_template(frame, bad, 4, 4);
        } catch (const spx::Error& e) {
            CHECK(e.code() == spx::ErrorCode::InvalidState);
        }
        spx::AffineState zero_scale{4, 4, 0, 0.0, 1, 0};
        CHECK_THROWS_AS(spx::extract_template(frame, zero_scale, 4, 4), spx::Error);
    }

    TEST_CASE("box and state conversions invert each other")
    {
        const spx::BoundingBox box{12.5, 7.0, 40.0, 25.0};
        const auto s = spx::state_from_box(box, 32, 32);
        CHECK(s.theta == 0.0);
        CHECK(s.skew == 0.0);
        CHECK(s.aspect == doctest::Approx(40.0 / 25.0));
        const auto back = spx::box_from_state(s, 32, 32);
        CHECK(back.x == doctest::Approx(box.x));
        CHECK(back.y == doctest::Approx(box.y));
        CHECK(back.w == doctest::Approx(box.w));
        CHECK(back.h == doctest::Approx(box.h));
    }
}
