#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "crimescope/core.hpp"

namespace crimescope::transforms {

using core::CArray;
using core::Complex;
using core::RArray;

// Packed multi-level 2D wavelet pyramid (Daubechies-4, periodic boundaries).
// coeffs has the padded shape (each dim rounded up to a multiple of 2^levels);
// orig_rows/orig_cols remember the pre-pad shape so synthesis can strip it.
struct WaveletCoeffs {
    CArray coeffs;
    int levels = 0;
    Eigen::Index orig_rows = 0;
    Eigen::Index orig_cols = 0;
};

inline constexpr int kDefaultWaveletLevels = 4;

// Orthogonal analysis/synthesis. For dims divisible by 2^levels the pair is
// exactly unitary (Parseval + perfect reconstruction); otherwise the input is
// zero-padded on the high-index side first, which keeps synthesis(analysis(x))
// exact but makes the operator an isometry rather than a bijection.
WaveletCoeffs dwt2(const CArray& img, int levels = kDefaultWaveletLevels);
CArray idwt2(const WaveletCoeffs& coeffs);

// Complex magnitude shrinkage c -> c * max(0, 1 - tau/|c|); the proximal map
// of tau*||.||_1. Applies to every subband including the coarse approximation.
CArray soft_threshold(const CArray& coeffs, double tau);
WaveletCoeffs soft_threshold(const WaveletCoeffs& coeffs, double tau);

// Vectorized b x b patches on a periodic grid with the given stride. Column l
// holds patch l in column-major order; origins[l] is its top-left coordinate.
struct PatchMatrix {
    Eigen::MatrixXcd cols;                                       // (b*b) x L
    std::vector<std::pair<Eigen::Index, Eigen::Index>> origins;  // top-left (row, col)
    int block = 0;
    int stride = 0;
    RArray weights;  // per-pixel overlap counts on the image grid
};

PatchMatrix extract_patches(const CArray& img, int block, int stride);

// Extract the patches whose top-left corners are `origins` (periodic wrap).
Eigen::MatrixXcd gather_patches(const CArray& img, int block,
                                const std::vector<std::pair<Eigen::Index, Eigen::Index>>& origins);

// Adjoint of extraction: scatter-add patch columns back onto the image grid.
CArray accumulate_patches(const Eigen::MatrixXcd& cols,
                          const std::vector<std::pair<Eigen::Index, Eigen::Index>>& origins,
                          int block, Eigen::Index rows, Eigen::Index cols_out);

// accumulate_patches followed by division by the overlap counts; the left
// inverse of extract_patches for unmodified patches.
CArray reassemble_patches(const PatchMatrix& pm, Eigen::Index rows, Eigen::Index cols);
CArray reassemble_patches(const PatchMatrix& pm, const Eigen::MatrixXcd& replacement_cols,
                          Eigen::Index rows, Eigen::Index cols);

}  // namespace crimescope::transforms
