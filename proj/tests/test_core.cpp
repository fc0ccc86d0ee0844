#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crimescope/core.hpp"
#include "oracles.hpp"

using namespace crimescope;
using core::CArray;
using core::Complex;

TEST_CASE("dft2_centered: constant 4x4 image concentrates at the centered DC bin") {
    CArray x = CArray::Constant(4, 4, Complex(1.0, 0.0));
    CArray k = core::dft2_centered(x);
    CHECK(std::abs(k(2, 2) - Complex(4.0, 0.0)) < 1e-12);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            if (i != 2 || j != 2) CHECK(std::abs(k(i, j)) < 1e-12);
}

TEST_CASE("idft2_centered: unit impulse at the 8x8 center gives constant 1/8") {
    CArray k = CArray::Zero(8, 8);
    k(4, 4) = Complex(1.0, 0.0);
    CArray x = core::idft2_centered(k);
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j) CHECK(std::abs(x(i, j) - Complex(0.125, 0.0)) < 1e-12);
}

TEST_CASE("dft2_centered: Parseval and round trip at 1e-12 relative") {
    for (unsigned seed : {1u, 2u, 3u}) {
        CArray x = oracles::random_carray(24, 17, seed);
        CArray k = core::dft2_centered(x);
        const double nx = std::sqrt(x.abs2().sum()), nk = std::sqrt(k.abs2().sum());
        CHECK(std::abs(nx - nk) / nx < 1e-12);
        CArray back = core::idft2_centered(k);
        CHECK(oracles::max_abs_diff(back, x) / nx < 1e-12);
    }
}

TEST_CASE("dft2_centered: matches the naive O(N^2) oracle on random 16x16") {
    CArray x = oracles::random_carray(16, 16, 7u);
    CHECK(oracles::max_abs_diff(core::dft2_centered(x), oracles::naive_dft2_centered(x, false)) <
          1e-10);
    CHECK(oracles::max_abs_diff(core::idft2_centered(x), oracles::naive_dft2_centered(x, true)) <
          1e-10);
}

TEST_CASE("dft2_centered: odd shapes agree with the oracle") {
    CArray x = oracles::random_carray(9, 13, 11u);
    CHECK(oracles::max_abs_diff(core::dft2_centered(x), oracles::naive_dft2_centered(x, false)) <
          1e-10);
    CArray back = core::idft2_centered(core::dft2_centered(x));
    CHECK(oracles::max_abs_diff(back, x) < 1e-12);
}

TEST_CASE("dft2_centered: linearity") {
    CArray x = oracles::random_carray(12, 12, 21u);
    CArray y = oracles::random_carray(12, 12, 22u);
    const Complex a(1.3, -0.4), b(-0.2, 2.1);
    CArray lhs = core::dft2_centered((a * x + b * y).eval());
    CArray rhs = a * core::dft2_centered(x) + b * core::dft2_centered(y);
    CHECK(oracles::max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("dft2_centered: rejects non-finite input") {
    CArray x = CArray::Zero(8, 8);
    x(1, 1) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(core::dft2_centered(x), std::invalid_argument);
}

TEST_CASE("zero_pad: factor 1 is the identity") {
    CArray x = oracles::random_carray(6, 5, 3u);
    CArray p = core::zero_pad(x, 1.0);
    CHECK(oracles::max_abs_diff(p, x) == 0.0);
}

TEST_CASE("zero_pad: 4x4 by factor 2 lands in rows/cols 2..5 with exact zeros elsewhere") {
    CArray x = oracles::random_carray(4, 4, 4u);
    CArray p = core::zero_pad(x, 2.0);
    REQUIRE(p.rows() == 8);
    REQUIRE(p.cols() == 8);
    int zeros = 0;
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 8; ++j) {
            if (i >= 2 && i <= 5 && j >= 2 && j <= 5) {
                CHECK(p(i, j) == x(i - 2, j - 2));
            } else {
                CHECK(p(i, j) == Complex(0.0, 0.0));
                ++zeros;
            }
        }
    CHECK(zeros == 48);
}

TEST_CASE("zero_pad: factor below 1 is rejected") {
    CArray x = CArray::Zero(4, 4);
    CHECK_THROWS_AS(core::zero_pad(x, 0.5), std::invalid_argument);
}

TEST_CASE("center_crop inverts zero_pad bit-exactly on small shapes") {
    for (Eigen::Index h : {4, 5, 6, 7})
        for (Eigen::Index w : {4, 5, 6, 7})
            for (double f : {1.0, 1.5, 2.0, 3.0}) {
                CArray x = oracles::random_carray(h, w, static_cast<unsigned>(h * 100 + w));
                CArray p = core::zero_pad(x, f);
                CArray back = core::center_crop(p, h, w);
                CHECK(oracles::max_abs_diff(back, x) == 0.0);
            }
}

TEST_CASE("center_crop: same shape is identity, oversize target rejected") {
    CArray x = oracles::random_carray(6, 6, 9u);
    CHECK(oracles::max_abs_diff(core::center_crop(x, 6, 6), x) == 0.0);
    CHECK_THROWS_AS(core::center_crop(x, 7, 6), std::invalid_argument);
}

TEST_CASE("zero_pad keeps the DC bin centered for even input sizes") {
    CArray x = CArray::Constant(8, 8, Complex(1.0, 0.0));
    CArray k = core::dft2_centered(x);
    CArray pk = core::zero_pad(k, 1.5);
    REQUIRE(pk.rows() == 12);
    CHECK(std::abs(pk(6, 6)) == std::abs(k(4, 4)));
}

TEST_CASE("rss_combine: single real non-negative coil passes through") {
    CArray x = oracles::random_carray(8, 8, 5u).abs().cast<Complex>();
    auto out = core::rss_combine({core::ComplexImage{x}});
    CHECK(oracles::max_abs_diff(out.data, x) < 1e-14);
}

TEST_CASE("rss_combine: modulus of 3+4i is 5") {
    CArray x = CArray::Zero(8, 8);
    x(3, 4) = Complex(3.0, 4.0);
    auto out = core::rss_combine({core::ComplexImage{x}});
    CHECK(out.data(3, 4).real() == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(out.data(3, 4).imag() == 0.0);
}

TEST_CASE("rss_combine: two coils match the scalar-loop oracle under 1e-12") {
    std::vector<CArray> coils = {oracles::random_carray(10, 12, 31u),
                                 oracles::random_carray(10, 12, 32u)};
    auto out = core::rss_combine({core::ComplexImage{coils[0]}, core::ComplexImage{coils[1]}});
    auto expect = oracles::naive_rss(coils);
    for (Eigen::Index j = 0; j < 12; ++j)
        for (Eigen::Index i = 0; i < 10; ++i) {
            CHECK(std::abs(out.data(i, j).real() - expect(i, j)) < 1e-12);
            CHECK(out.data(i, j).imag() == 0.0);
            CHECK(out.data(i, j).real() >= 0.0);
        }
}

TEST_CASE("rss_combine: shape mismatch rejected") {
    core::ComplexImage a{CArray::Zero(8, 8)}, b{CArray::Zero(8, 9)};
    CHECK_THROWS_AS(core::rss_combine({a, b}), std::invalid_argument);
}
