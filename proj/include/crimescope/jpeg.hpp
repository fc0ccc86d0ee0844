#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>

namespace crimescope::jpeg {

using Gray8 = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using Block = Eigen::Matrix<double, 8, 8>;
using IBlock = Eigen::Matrix<int, 8, 8>;
using QTable = std::array<int, 64>;  // row-major (row*8 + col)

// Standard luminance table scaled by the libjpeg convention
// (scale = 5000/QF for QF < 50, else 200 - 2*QF; entries clamped to [1,255]).
// QF 50 returns the Annex K table unchanged.
QTable quantization_table(int quality_factor);

// Orthonormal 8x8 DCT-II pair in the baseline JPEG normalization.
Block dct2d8(const Block& spatial);
Block idct2d8(const Block& freq);

// round(F/Q), half away from zero. Input is the level-shifted spatial block.
IBlock quantize_block(const Block& level_shifted, const QTable& q);
Block dequantize_block(const IBlock& coeffs, const QTable& q);

// Quantized coefficients of one level-shifted 8x8 block at the given QF.
IBlock encode_block(const Block& level_shifted, int quality_factor);

// Baseline sequential encode/decode round trip of an 8-bit grayscale image:
// level shift by 128, per-block DCT, quantize, dequantize, inverse DCT,
// clamp. Non-multiple-of-8 extents are edge-replicated and cropped back.
Gray8 roundtrip(const Gray8& img, int quality_factor);

}  // namespace crimescope::jpeg
