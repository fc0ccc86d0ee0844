#include "crimescope/jpeg.hpp"

#include <cmath>
#include <stdexcept>

namespace crimescope::jpeg {

namespace {

// ITU-T T.81 Annex K luminance table.
constexpr int kBaseTable[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

const Block& dct_matrix() {
    static const Block m = [] {
        Block b;
        for (int u = 0; u < 8; ++u) {
            const double cu = (u == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
            for (int x = 0; x < 8; ++x)
                b(u, x) = 0.5 * cu * std::cos((2.0 * x + 1.0) * u * M_PI / 16.0);
        }
        return b;
    }();
    return m;
}

void check_qf(int qf) {
    if (qf < 1 || qf > 100) throw std::invalid_argument("quality factor must be in 1..100");
}

}  // namespace

QTable quantization_table(int quality_factor) {
    check_qf(quality_factor);
    const int scale = quality_factor < 50 ? 5000 / quality_factor : 200 - 2 * quality_factor;
    QTable q;
    for (int i = 0; i < 64; ++i) {
        int v = (kBaseTable[i] * scale + 50) / 100;
        if (v < 1) v = 1;
        if (v > 255) v = 255;
        q[static_cast<std::size_t>(i)] = v;
    }
    return q;
}

Block dct2d8(const Block& spatial) {
    const Block& m = dct_matrix();
    return m * spatial * m.transpose();
}

Block idct2d8(const Block& freq) {
    const Block& m = dct_matrix();
    return m.transpose() * freq * m;
}

IBlock quantize_block(const Block& level_shifted, const QTable& q) {
    const Block f = dct2d8(level_shifted);
    IBlock out;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            out(r, c) = static_cast<int>(std::lround(f(r, c) / q[static_cast<std::size_t>(r * 8 + c)]));
    return out;
}

Block dequantize_block(const IBlock& coeffs, const QTable& q) {
    Block f;
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            f(r, c) = static_cast<double>(coeffs(r, c)) * q[static_cast<std::size_t>(r * 8 + c)];
    return idct2d8(f);
}

IBlock encode_block(const Block& level_shifted, int quality_factor) {
    return quantize_block(level_shifted, quantization_table(quality_factor));
}

Gray8 roundtrip(const Gray8& img, int quality_factor) {
    const QTable q = quantization_table(quality_factor);
    const Eigen::Index h = img.rows(), w = img.cols();
    if (h < 1 || w < 1) throw std::invalid_argument("jpeg roundtrip: empty image");
    const Eigen::Index hp = ((h + 7) / 8) * 8, wp = ((w + 7) / 8) * 8;

    // edge-replicated working copy
    Eigen::ArrayXXd work(hp, wp);
    for (Eigen::Index j = 0; j < wp; ++j) {
        const Eigen::Index sj = std::min(j, w - 1);
        for (Eigen::Index i = 0; i < hp; ++i)
            work(i, j) = static_cast<double>(img(std::min(i, h - 1), sj)) - 128.0;
    }

    for (Eigen::Index bi = 0; bi < hp; bi += 8)
        for (Eigen::Index bj = 0; bj < wp; bj += 8) {
            Block blk = work.block(bi, bj, 8, 8).matrix();
            work.block(bi, bj, 8, 8) = dequantize_block(quantize_block(blk, q), q).array();
        }

    Gray8 out(h, w);
    for (Eigen::Index j = 0; j < w; ++j)
        for (Eigen::Index i = 0; i < h; ++i) {
            long v = std::lround(work(i, j) + 128.0);
            if (v < 0) v = 0;
            if (v > 255) v = 255;
            out(i, j) = static_cast<std::uint8_t>(v);
        }
    return out;
}

}  // namespace crimescope::jpeg
