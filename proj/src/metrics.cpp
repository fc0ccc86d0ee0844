#include "crimescope/metrics.hpp"

#include <cmath>

namespace crimescope::metrics {

using core::RArray;

const char* to_string(NrmseNorm n) { return n == NrmseNorm::Range ? "range" : "l2"; }

NrmseNorm nrmse_norm_from_string(const std::string& s) {
    if (s == "range") return NrmseNorm::Range;
    if (s == "l2") return NrmseNorm::L2;
    throw std::invalid_argument("unknown nrmse norm: " + s);
}

namespace {

void check_shapes(const core::ComplexImage& ref, const core::ComplexImage& est,
                  const char* what) {
    if (ref.rows() != est.rows() || ref.cols() != est.cols())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    if (ref.rows() < 1 || ref.cols() < 1)
        throw std::invalid_argument(std::string(what) + ": empty input");
}

}  // namespace

double nrmse(const core::ComplexImage& ref, const core::ComplexImage& est, NrmseNorm norm) {
    check_shapes(ref, est, "nrmse");
    const RArray r = ref.data.abs();
    const RArray e = est.data.abs();
    const double mse = (e - r).square().mean();

    double denom = 0.0;
    if (norm == NrmseNorm::Range) {
        denom = r.maxCoeff() - r.minCoeff();
        if (denom <= 0.0) throw UndefinedMetricError("nrmse: reference has zero dynamic range");
    } else {
        denom = std::sqrt(r.square().mean());
        if (denom <= 0.0) throw UndefinedMetricError("nrmse: reference has zero norm");
    }
    return std::sqrt(mse) / denom;
}

double ssim(const core::ComplexImage& ref, const core::ComplexImage& est) {
    check_shapes(ref, est, "ssim");
    constexpr int kWin = 11;
    constexpr double kSigma = 1.5;
    constexpr double kK1 = 0.01, kK2 = 0.03;
    const Eigen::Index h = ref.rows(), w = ref.cols();
    if (h < kWin || w < kWin) throw std::invalid_argument("ssim: image smaller than the window");

    const RArray x = ref.data.abs();
    const RArray y = est.data.abs();

    const double range = x.maxCoeff() - x.minCoeff();
    if (range <= 0.0) throw UndefinedMetricError("ssim: reference has zero dynamic range");
    const double c1 = (kK1 * range) * (kK1 * range);
    const double c2 = (kK2 * range) * (kK2 * range);

    // normalized Gaussian weights over the 11x11 support
    double wtab[kWin][kWin];
    double wsum = 0.0;
    for (int a = 0; a < kWin; ++a)
        for (int b = 0; b < kWin; ++b) {
            const double da = a - (kWin - 1) / 2.0, db = b - (kWin - 1) / 2.0;
            wtab[a][b] = std::exp(-(da * da + db * db) / (2.0 * kSigma * kSigma));
            wsum += wtab[a][b];
        }
    for (auto& row : wtab)
        for (double& v : row) v /= wsum;

    double acc = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i + kWin <= h; ++i)
        for (Eigen::Index j = 0; j + kWin <= w; ++j) {
            double mx = 0.0, my = 0.0;
            for (int a = 0; a < kWin; ++a)
                for (int b = 0; b < kWin; ++b) {
                    mx += wtab[a][b] * x(i + a, j + b);
                    my += wtab[a][b] * y(i + a, j + b);
                }
            double vx = 0.0, vy = 0.0, cxy = 0.0;
            for (int a = 0; a < kWin; ++a)
                for (int b = 0; b < kWin; ++b) {
                    const double dx = x(i + a, j + b) - mx;
                    const double dy = y(i + a, j + b) - my;
                    vx += wtab[a][b] * dx * dx;
                    vy += wtab[a][b] * dy * dy;
                    cxy += wtab[a][b] * dx * dy;
                }
            const double num = (2.0 * mx * my + c1) * (2.0 * cxy + c2);
            const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
            acc += num / den;
            ++count;
        }
    return acc / static_cast<double>(count);
}

}  // namespace crimescope::metrics
