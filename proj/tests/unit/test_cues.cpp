#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "spx/cues.hpp"
#include "spx/error.hpp"
#include "spx/media.hpp"
#include "spx/snic.hpp"

TEST_SUITE("cues")
{
    TEST_CASE("single-bin mass")
    {
        const std::vector<double> zeros(20, 0.0);
        const auto f = spx::channel_histogram(zeros, 8);
        CHECK(f[0] == 1.0);
        for (int i = 1; i < 8; ++i)
            CHECK(f[i] == 0.0);
    }

    TEST_CASE("five of twenty values in bin three")
    {
        std::vector<double> v(15, 0.05);
        for (int i = 0; i < 5; ++i)
            v.push_back(3.5 / 8.0);
        const auto f = spx::channel_histogram(v, 8);
        CHECK(f[3] == 0.25);
        CHECK(f[0] == 0.75);
    }

    TEST_CASE("bin edges: left closed, last bin closed at one")
    {
        CHECK(spx::histogram_bin(0.0, 8) == 0);
        CHECK(spx::histogram_bin(0.125, 8) == 1);
        CHECK(spx::histogram_bin(0.999, 8) == 7);
        CHECK(spx::histogram_bin(1.0, 8) == 7);
    }

    TEST_CASE("counting oracle and mass conservation")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> v(100);
            for (double& x : v)
                x = u(rng);
            const auto f = spx::channel_histogram(v, 8);
            const auto want = oracle::count_bins(v, 8);
            for (int i = 0; i < 8; ++i)
                CHECK(f[i] == want[i]);
            CHECK(std::abs(f.sum() - 1.0) <= 1e-12);

            auto shuffled = v;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            CHECK(spx::channel_histogram(shuffled, 8) == f);
        }
    }

    TEST_CASE("empty region is degenerate")
    {
        try {
            spx::channel_histogram({}, 8);
            FAIL("expected an error");
        } catch (const spx::Error& e) {
            CHECK(e.code() == spx::ErrorCode::DegenerateRegion);
        }
    }

    TEST_CASE("uniform gray region gives one-hot color columns")
    {
        spx::Patch p;
        p.rgb = spx::ImageRGB(32, 32);
        for (double& v : p.rgb.data())
            v = 0.5;
        p.hsi = spx::rgb_to_hsi(p.rgb);
        spx::LabelMap lm;
        lm.width = 32;
        lm.height = 32;
        lm.k = 2;
        lm.labels.assign(32 * 32, 1);
        for (int y = 0; y < 32; ++y)
            lm.labels[y * 32] = 0; // leftmost column
        const auto fm = spx::superpixel_features(p, lm, 0, 8);
        REQUIRE(fm.rows() == 8);
        REQUIRE(fm.cols() == 8);
        for (int c : {spx::CueS, spx::CueI, spx::CueR, spx::CueG, spx::CueB})
            CHECK(fm.col(c).maxCoeff() == 1.0);
        CHECK(fm(0, spx::CueX) == 1.0);
        // y runs over 0..31, 4 rows per bin
        for (int i = 0; i < 8; ++i)
            CHECK(fm(i, spx::CueY) == doctest::Approx(0.125));
    }

    TEST_CASE("feature columns equal per-channel histograms")
    {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        spx::Patch p;
        p.rgb = spx::ImageRGB(32, 32);
        for (double& v : p.rgb.data())
            v = u(rng);
        p.hsi = spx::rgb_to_hsi(p.rgb);
        const auto lm = spx::segment(p, 30, 20.0);
        const auto all = spx::all_superpixel_features(p, lm, 8);
        REQUIRE(all.size() == 30);
        for (int l = 0; l < 30; ++l) {
            std::vector<std::vector<double>> ch(8);
            for (int y = 0; y < 32; ++y)
                for (int x = 0; x < 32; ++x) {
                    if (lm.at(x, y) != l)
                        continue;
                    for (int c = 0; c < 3; ++c) {
                        ch[c].push_back(p.hsi.at(x, y, c));
                        ch[3 + c].push_back(p.rgb.at(x, y, c));
                    }
                    ch[6].push_back(x / 31.0);
                    ch[7].push_back(y / 31.0);
                }
            const auto fm = spx::superpixel_features(p, lm, l, 8);
            CHECK(fm == all[l]);
            for (int c = 0; c < 8; ++c) {
                const auto want = oracle::count_bins(ch[c], 8);
                for (int i = 0; i < 8; ++i)
                    CHECK(fm(i, c) == want[i]);
                CHECK(std::abs(fm.col(c).sum() - 1.0) <= 1e-12);
            }
        }
    }

    TEST_CASE("flatten is column-major and invertible")
    {
        spx::FeatureMatrix fm = spx::FeatureMatrix::Zero(2, 8);
        fm(0, 0) = 1.0;
        fm(1, 1) = 1.0;
        const auto a = spx::flatten(fm);
        CHECK(a.size() == 16);
        CHECK(a[0] == 1.0);
        CHECK(a[1] == 0.0);
        CHECK(a[3] == 1.0);
        CHECK(spx::unflatten(a, 2) == fm);
        CHECK(spx::flatten(spx::FeatureMatrix::Zero(8, 8)).size() == 64);
    }
}
