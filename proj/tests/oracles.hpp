#pragma once

// Independent brute-force reference implementations used only by tests.
// These deliberately avoid the library's transform code paths.

#include <Eigen/Core>
#include <cmath>
#include <complex>

#include "crimescope/core.hpp"

namespace oracles {

using crimescope::core::CArray;
using crimescope::core::Complex;

// O(N^2) double-sum centered unitary DFT.
inline CArray naive_dft2_centered(const CArray& x, bool inverse) {
    const Eigen::Index h = x.rows(), w = x.cols();
    const double sign = inverse ? 1.0 : -1.0;
    const Eigen::Index ch = h / 2, cw = w / 2;
    CArray out(h, w);
    for (Eigen::Index ki = 0; ki < h; ++ki)
        for (Eigen::Index kj = 0; kj < w; ++kj) {
            Complex acc(0.0, 0.0);
            for (Eigen::Index ni = 0; ni < h; ++ni)
                for (Eigen::Index nj = 0; nj < w; ++nj) {
                    const double phase =
                        2.0 * M_PI *
                        (static_cast<double>((ki - ch) * (ni - ch)) / static_cast<double>(h) +
                         static_cast<double>((kj - cw) * (nj - cw)) / static_cast<double>(w));
                    acc += x(ni, nj) * Complex(std::cos(phase), sign * std::sin(phase));
                }
            out(ki, kj) = acc / std::sqrt(static_cast<double>(h) * static_cast<double>(w));
        }
    return out;
}

// Scalar-loop RSS.
inline Eigen::ArrayXXd naive_rss(const std::vector<CArray>& coils) {
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(coils.front().rows(), coils.front().cols());
    for (const auto& c : coils)
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            for (Eigen::Index i = 0; i < c.rows(); ++i)
                out(i, j) += std::norm(c(i, j));
    return out.sqrt();
}

// Deterministic pseudo-random complex array (independent of library RNG).
inline CArray random_carray(Eigen::Index h, Eigen::Index w, unsigned seed) {
    CArray out(h, w);
    unsigned state = seed * 2654435761u + 12345u;
    auto next = [&state]() {
        state = state * 1664525u + 1013904223u;
        return static_cast<double>(state >> 8) / static_cast<double>(1u << 24) - 0.5;
    };
    for (Eigen::Index j = 0; j < w; ++j)
        for (Eigen::Index i = 0; i < h; ++i) out(i, j) = Complex(next(), next());
    return out;
}

inline double max_abs_diff(const CArray& a, const CArray& b) {
    return (a - b).abs().maxCoeff();
}

}  // namespace oracles
