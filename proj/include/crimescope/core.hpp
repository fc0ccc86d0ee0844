#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <vector>

namespace crimescope::core {

using Complex = std::complex<double>;
using CArray = Eigen::ArrayXXcd;  // H x W, column-major
using RArray = Eigen::ArrayXXd;
using BArray = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// 2D image-domain array. Pipeline-level data additionally satisfies
// H >= 8, W >= 8 and finiteness; enforce with validate() at module
// boundaries. The transform operations themselves accept any shape >= 1x1.
struct ComplexImage {
    CArray data;

    Eigen::Index rows() const { return data.rows(); }
    Eigen::Index cols() const { return data.cols(); }
    void validate(const char* what = "ComplexImage") const;
};

// Frequency-domain array. Centered layout: the DC term sits at index
// (floor(H/2), floor(W/2)).
struct KSpace {
    CArray data;

    Eigen::Index rows() const { return data.rows(); }
    Eigen::Index cols() const { return data.cols(); }
    void validate(const char* what = "KSpace") const;
};

struct MultiCoilKSpace {
    std::vector<KSpace> coils;

    Eigen::Index rows() const { return coils.front().rows(); }
    Eigen::Index cols() const { return coils.front().cols(); }
    std::size_t coil_count() const { return coils.size(); }
    void validate() const;
};

bool all_finite(const CArray& a);

// Circular shift: out((i+dr) mod H, (j+dc) mod W) = in(i, j).
CArray roll(const CArray& a, Eigen::Index dr, Eigen::Index dc);

// Centered unitary 2D DFT (1/sqrt(HW) both directions). DC lands at
// (floor(H/2), floor(W/2)).
CArray dft2_centered(const CArray& img);
CArray idft2_centered(const CArray& ksp);

KSpace dft2_centered(const ComplexImage& img);
ComplexImage idft2_centered(const KSpace& ksp);

// Embed into a round(H*factor) x round(W*factor) array of zeros such that
// the input occupies the centered block. When the total padding on an axis
// is odd, the extra row/column goes on the high-index side.
CArray zero_pad(const CArray& a, double factor);
KSpace zero_pad_kspace(const KSpace& k, double factor);
MultiCoilKSpace zero_pad_kspace(const MultiCoilKSpace& mck, double factor);

// Inverse of zero_pad's placement: extracts the centered block.
CArray center_crop(const CArray& a, Eigen::Index target_rows, Eigen::Index target_cols);
KSpace center_crop(const KSpace& k, Eigen::Index target_rows, Eigen::Index target_cols);

// Per-pixel sqrt(sum_c |x_c|^2). Output is real non-negative (imaginary
// parts exactly zero).
ComplexImage rss_combine(const std::vector<ComplexImage>& coil_images);

}  // namespace crimescope::core
