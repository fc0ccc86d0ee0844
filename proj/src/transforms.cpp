#include "crimescope/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace crimescope::transforms {

namespace {

// Daubechies-4 (8-tap) orthonormal scaling filter, synthesis convention.
constexpr int kTaps = 8;
constexpr double kRecLo[kTaps] = {
    0.23037781330885523,   0.7148465705525415,   0.6308807679295904,
    -0.02798376941698385,  -0.18703481171888114, 0.030841381835986965,
    0.032883011666982945,  -0.010597401784997278};

struct FilterBank {
    double dec_lo[kTaps];
    double dec_hi[kTaps];
    FilterBank() {
        for (int n = 0; n < kTaps; ++n) dec_lo[n] = kRecLo[kTaps - 1 - n];
        // alternating-flip construction keeps the pair conjugate-quadrature
        for (int n = 0; n < kTaps; ++n)
            dec_hi[n] = (n % 2 == 0 ? 1.0 : -1.0) * dec_lo[kTaps - 1 - n];
    }
};

const FilterBank& bank() {
    static FilterBank fb;
    return fb;
}

// One periodized analysis step along a length-n (even) vector.
void dwt1(const Complex* x, Complex* out, Eigen::Index n) {
    const auto& fb = bank();
    const Eigen::Index half = n / 2;
    for (Eigen::Index k = 0; k < half; ++k) {
        Complex a(0.0, 0.0), d(0.0, 0.0);
        for (int t = 0; t < kTaps; ++t) {
            const Complex v = x[(2 * k + t) % n];
            a += fb.dec_lo[t] * v;
            d += fb.dec_hi[t] * v;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

// Adjoint of dwt1 (exact synthesis for the orthonormal periodized bank).
void idwt1(const Complex* c, Complex* out, Eigen::Index n) {
    const auto& fb = bank();
    const Eigen::Index half = n / 2;
    for (Eigen::Index m = 0; m < n; ++m) out[m] = Complex(0.0, 0.0);
    for (Eigen::Index k = 0; k < half; ++k) {
        const Complex a = c[k], d = c[half + k];
        for (int t = 0; t < kTaps; ++t) {
            const Eigen::Index m = (2 * k + t) % n;
            out[m] += fb.dec_lo[t] * a + fb.dec_hi[t] * d;
        }
    }
}

Eigen::Index pad_up(Eigen::Index n, Eigen::Index mult) {
    return ((n + mult - 1) / mult) * mult;
}

}  // namespace

WaveletCoeffs dwt2(const CArray& img, int levels) {
    if (levels < 1) throw std::invalid_argument("dwt2: levels must be >= 1");
    const Eigen::Index mult = Eigen::Index(1) << levels;
    const Eigen::Index h = pad_up(img.rows(), mult);
    const Eigen::Index w = pad_up(img.cols(), mult);
    if ((h >> levels) < 1 || (w >> levels) < 1)
        throw std::invalid_argument("dwt2: too many levels for input size");

    WaveletCoeffs out;
    out.levels = levels;
    out.orig_rows = img.rows();
    out.orig_cols = img.cols();
    out.coeffs = CArray::Zero(h, w);
    out.coeffs.block(0, 0, img.rows(), img.cols()) = img;

    std::vector<Complex> buf_in, buf_out;
    Eigen::Index ch = h, cw = w;
    for (int lev = 0; lev < levels; ++lev) {
        // columns
        buf_in.resize(ch);
        buf_out.resize(ch);
        for (Eigen::Index j = 0; j < cw; ++j) {
            for (Eigen::Index i = 0; i < ch; ++i) buf_in[i] = out.coeffs(i, j);
            dwt1(buf_in.data(), buf_out.data(), ch);
            for (Eigen::Index i = 0; i < ch; ++i) out.coeffs(i, j) = buf_out[i];
        }
        // rows
        buf_in.resize(cw);
        buf_out.resize(cw);
        for (Eigen::Index i = 0; i < ch; ++i) {
            for (Eigen::Index j = 0; j < cw; ++j) buf_in[j] = out.coeffs(i, j);
            dwt1(buf_in.data(), buf_out.data(), cw);
            for (Eigen::Index j = 0; j < cw; ++j) out.coeffs(i, j) = buf_out[j];
        }
        ch /= 2;
        cw /= 2;
    }
    return out;
}

CArray idwt2(const WaveletCoeffs& coeffs) {
    const Eigen::Index h = coeffs.coeffs.rows(), w = coeffs.coeffs.cols();
    CArray work = coeffs.coeffs;
    std::vector<Complex> buf_in, buf_out;
    for (int lev = coeffs.levels - 1; lev >= 0; --lev) {
        const Eigen::Index ch = h >> lev, cw = w >> lev;
        // rows
        buf_in.resize(cw);
        buf_out.resize(cw);
        for (Eigen::Index i = 0; i < ch; ++i) {
            for (Eigen::Index j = 0; j < cw; ++j) buf_in[j] = work(i, j);
            idwt1(buf_in.data(), buf_out.data(), cw);
            for (Eigen::Index j = 0; j < cw; ++j) work(i, j) = buf_out[j];
        }
        // columns
        buf_in.resize(ch);
        buf_out.resize(ch);
        for (Eigen::Index j = 0; j < cw; ++j) {
            for (Eigen::Index i = 0; i < ch; ++i) buf_in[i] = work(i, j);
            idwt1(buf_in.data(), buf_out.data(), ch);
            for (Eigen::Index i = 0; i < ch; ++i) work(i, j) = buf_out[i];
        }
    }
    return work.block(0, 0, coeffs.orig_rows, coeffs.orig_cols);
}

CArray soft_threshold(const CArray& coeffs, double tau) {
    if (tau < 0.0) throw std::invalid_argument("soft_threshold: tau must be >= 0");
    CArray out(coeffs.rows(), coeffs.cols());
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j)
        for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
            const Complex c = coeffs(i, j);
            const double mag = std::abs(c);
            out(i, j) = (mag <= tau) ? Complex(0.0, 0.0) : c * (1.0 - tau / mag);
        }
    return out;
}

WaveletCoeffs soft_threshold(const WaveletCoeffs& coeffs, double tau) {
    WaveletCoeffs out = coeffs;
    out.coeffs = soft_threshold(coeffs.coeffs, tau);
    return out;
}

PatchMatrix extract_patches(const CArray& img, int block, int stride) {
    if (block < 2) throw std::invalid_argument("extract_patches: block must be >= 2");
    if (stride < 1 || stride > block)
        throw std::invalid_argument("extract_patches: need 1 <= stride <= block");
    const Eigen::Index h = img.rows(), w = img.cols();
    if (block > h || block > w)
        throw std::invalid_argument("extract_patches: block exceeds image");

    PatchMatrix pm;
    pm.block = block;
    pm.stride = stride;
    for (Eigen::Index i = 0; i < h; i += stride)
        for (Eigen::Index j = 0; j < w; j += stride) pm.origins.emplace_back(i, j);
    pm.cols = gather_patches(img, block, pm.origins);

    pm.weights = RArray::Zero(h, w);
    for (const auto& [oi, oj] : pm.origins)
        for (int c = 0; c < block; ++c)
            for (int r = 0; r < block; ++r) pm.weights((oi + r) % h, (oj + c) % w) += 1.0;
    return pm;
}

Eigen::MatrixXcd gather_patches(
    const CArray& img, int block,
    const std::vector<std::pair<Eigen::Index, Eigen::Index>>& origins) {
    const Eigen::Index h = img.rows(), w = img.cols();
    Eigen::MatrixXcd cols(static_cast<Eigen::Index>(block) * block,
                          static_cast<Eigen::Index>(origins.size()));
    for (std::size_t l = 0; l < origins.size(); ++l) {
        const auto [oi, oj] = origins[l];
        Eigen::Index idx = 0;
        for (int c = 0; c < block; ++c) {
            const Eigen::Index jj = (oj + c) % w;
            for (int r = 0; r < block; ++r)
                cols(idx++, static_cast<Eigen::Index>(l)) = img((oi + r) % h, jj);
        }
    }
    return cols;
}

CArray accumulate_patches(const Eigen::MatrixXcd& cols,
                          const std::vector<std::pair<Eigen::Index, Eigen::Index>>& origins,
                          int block, Eigen::Index rows, Eigen::Index cols_out) {
    if (cols.rows() != static_cast<Eigen::Index>(block) * block ||
        cols.cols() != static_cast<Eigen::Index>(origins.size()))
        throw std::invalid_argument("accumulate_patches: shape mismatch");
    CArray out = CArray::Zero(rows, cols_out);
    for (std::size_t l = 0; l < origins.size(); ++l) {
        const auto [oi, oj] = origins[l];
        Eigen::Index idx = 0;
        for (int c = 0; c < block; ++c) {
            const Eigen::Index jj = (oj + c) % cols_out;
            for (int r = 0; r < block; ++r)
                out((oi + r) % rows, jj) += cols(idx++, static_cast<Eigen::Index>(l));
        }
    }
    return out;
}

CArray reassemble_patches(const PatchMatrix& pm, Eigen::Index rows, Eigen::Index cols) {
    return reassemble_patches(pm, pm.cols, rows, cols);
}

CArray reassemble_patches(const PatchMatrix& pm, const Eigen::MatrixXcd& replacement_cols,
                          Eigen::Index rows, Eigen::Index cols) {
    CArray acc = accumulate_patches(replacement_cols, pm.origins, pm.block, rows, cols);
    return acc / pm.weights.cast<Complex>();
}

}  // namespace crimescope::transforms
