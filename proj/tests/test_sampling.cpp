#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crimescope/rng.hpp"
#include "crimescope/sampling.hpp"

using namespace crimescope;
using sampling::Shape;

TEST_CASE("build_pdf: uniform with no calibration is the constant target") {
    auto pdf = sampling::build_pdf({32, 32}, sampling::SamplingScheme::uniform(), 0.17, {0, 0});
    for (Eigen::Index j = 0; j < 32; ++j)
        for (Eigen::Index i = 0; i < 32; ++i)
            CHECK(pdf.prob(i, j) == doctest::Approx(0.17).epsilon(1e-9));
}

TEST_CASE("build_pdf: mean hits the target within 1e-4 for every scheme") {
    const Shape shape{120, 96};
    const Shape calib{6, 6};
    for (auto scheme : {sampling::SamplingScheme::uniform(), sampling::SamplingScheme::weak_vd(),
                        sampling::SamplingScheme::strong_vd(3)}) {
        for (double rate : {0.1, 0.25, 0.5}) {
            auto pdf = sampling::build_pdf(shape, scheme, rate, calib);
            CHECK(std::abs(pdf.prob.mean() - rate) < 1e-4);
            CHECK(pdf.prob.maxCoeff() <= 1.0);
            CHECK(pdf.prob.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("build_pdf: calibration block is exactly 1") {
    auto pdf = sampling::build_pdf({64, 64}, sampling::SamplingScheme::weak_vd(), 0.2, {6, 6});
    for (Eigen::Index i = 29; i < 35; ++i)
        for (Eigen::Index j = 29; j < 35; ++j) CHECK(pdf.prob(i, j) == 1.0);
}

TEST_CASE("build_pdf: weak VD p=7 on 320x320 is radially monotone with center 1") {
    auto pdf =
        sampling::build_pdf({320, 320}, sampling::SamplingScheme::weak_vd(7), 0.17, {6, 6});
    CHECK(pdf.prob(160, 160) == 1.0);
    // corner sits at the additive offset (profile is zero there)
    CHECK(pdf.prob(0, 0) == doctest::Approx(pdf.offset).epsilon(1e-12));

    // exhaustive scan: the profile must be non-increasing in radius outside
    // the forced calibration block
    std::vector<std::pair<double, double>> rp;
    for (Eigen::Index i = 0; i < 320; ++i)
        for (Eigen::Index j = 0; j < 320; ++j) {
            if (i >= 157 && i < 163 && j >= 157 && j < 163) continue;
            const double u = (static_cast<double>(i) - 160.0) / 160.0;
            const double v = (static_cast<double>(j) - 160.0) / 160.0;
            rp.push_back({std::min(1.0, std::hypot(u, v)), pdf.prob(i, j)});
        }
    std::sort(rp.begin(), rp.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double prev = 2.0;
    double prev_r = -1.0;
    for (const auto& [r, p] : rp) {
        if (r > prev_r + 1e-12) {
            CHECK(p <= prev + 1e-12);
            prev = p;
            prev_r = r;
        } else {
            prev = std::min(prev, p);
        }
    }
}

TEST_CASE("build_pdf: infeasible target below the calibration contribution") {
    CHECK_THROWS_AS(
        sampling::build_pdf({32, 32}, sampling::SamplingScheme::uniform(), 0.01, {16, 16}),
        sampling::InfeasibleRateError);
}

TEST_CASE("draw_mask: all-ones pdf gives a fully sampled mask") {
    auto pdf = sampling::build_pdf({16, 16}, sampling::SamplingScheme::uniform(), 1.0, {0, 0});
    auto mask = sampling::draw_mask(pdf, 7);
    CHECK(mask.realized_rate == 1.0);
}

TEST_CASE("draw_mask: calibration-only pdf counts exactly the block") {
    // target equals the calibration contribution: offset drives the rest to 0
    const double rate = 36.0 / (320.0 * 320.0);
    auto pdf = sampling::build_pdf({320, 320}, sampling::SamplingScheme::strong_vd(3), rate,
                                   {6, 6});
    auto mask = sampling::draw_mask(pdf, 3);
    CHECK(mask.ones() == 36);
    CHECK(mask.realized_rate == doctest::Approx(rate).epsilon(1e-12));
}

TEST_CASE("draw_mask: bit-identical for a fixed seed and calibration always sampled") {
    auto pdf = sampling::build_pdf({64, 48}, sampling::SamplingScheme::weak_vd(), 0.3, {4, 4});
    auto a = sampling::draw_mask(pdf, 1234);
    auto b = sampling::draw_mask(pdf, 1234);
    CHECK((a.mask == b.mask).all());
    auto c = sampling::draw_mask(pdf, 1235);
    CHECK(!(a.mask == c.mask).all());
    for (Eigen::Index i = 30; i < 34; ++i)
        for (Eigen::Index j = 22; j < 26; ++j) CHECK(a.mask(i, j) == 1);
}

TEST_CASE("draw_mask: uniform realized rates match binomial statistics over 100 seeds") {
    auto pdf = sampling::build_pdf({320, 320}, sampling::SamplingScheme::uniform(), 0.17, {0, 0});
    double mean = 0.0;
    const int n = 100;
    for (int k = 0; k < n; ++k) mean += sampling::draw_mask(pdf, rng::mix(5, k)).realized_rate;
    mean /= n;
    const double se = std::sqrt(0.17 * 0.83 / (320.0 * 320.0)) / std::sqrt(n);
    CHECK(std::abs(mean - 0.17) < 3.0 * se);
}

TEST_CASE("effective_rate: trivial cases") {
    auto pdf = sampling::build_pdf({40, 40}, sampling::SamplingScheme::weak_vd(), 0.3, {4, 4});
    auto mask = sampling::draw_mask(pdf, 11);
    CHECK(sampling::effective_rate(mask, {40, 40}) == doctest::Approx(mask.realized_rate));

    auto full = sampling::draw_mask(
        sampling::build_pdf({40, 40}, sampling::SamplingScheme::uniform(), 1.0, {0, 0}), 1);
    CHECK(sampling::effective_rate(full, {20, 20}) == 1.0);
    CHECK(sampling::effective_rate(full, {7, 13}) == 1.0);

    CHECK_THROWS_AS(sampling::effective_rate(mask, {41, 40}), std::invalid_argument);
}

TEST_CASE("mask_statistics: weak VD 17% at 2x padding reproduces the reported band") {
    auto rows = sampling::mask_statistics({sampling::SamplingScheme::weak_vd(7)}, {2.0}, 0.17, 15,
                                          {320, 320}, {6, 6}, 99);
    REQUIRE(rows.size() == 1);
    // paper reports 24% effective at 2x padding
    CHECK(rows[0].mean_effective > 0.19);
    CHECK(rows[0].mean_effective < 0.30);
}

TEST_CASE("mask_statistics: uniform neutral, VD strictly increasing with padding") {
    const std::vector<double> pads{1.0, 1.5, 2.0, 3.0};
    auto rows = sampling::mask_statistics(
        {sampling::SamplingScheme::uniform(), sampling::SamplingScheme::weak_vd(7),
         sampling::SamplingScheme::strong_vd(3)},
        pads, 0.17, 15, {160, 160}, {4, 4}, 7);
    REQUIRE(rows.size() == 12);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(rows[i].mean_effective - 0.17) < 0.01);
    for (std::size_t s = 1; s < 3; ++s)
        for (std::size_t i = 1; i < 4; ++i)
            CHECK(rows[s * 4 + i].mean_effective > rows[s * 4 + i - 1].mean_effective);
    // strong VD at 3x padding: conservative lower bound from the paper's figure
    CHECK(rows[2 * 4 + 3].mean_effective > 0.40);
}

TEST_CASE("strong_vd_power_for follows the paper mapping") {
    CHECK(sampling::strong_vd_power_for(2) == 1);
    CHECK(sampling::strong_vd_power_for(3) == 2);
    CHECK(sampling::strong_vd_power_for(4) == 3);
}
