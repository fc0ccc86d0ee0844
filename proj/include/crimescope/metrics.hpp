#pragma once

#include <stdexcept>
#include <string>

#include "crimescope/core.hpp"

namespace crimescope::metrics {

// The reference image has zero dynamic range, so the metric denominator is
// undefined.
struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class NrmseNorm { Range, L2 };

const char* to_string(NrmseNorm n);
NrmseNorm nrmse_norm_from_string(const std::string& s);

// Root mean square error between magnitudes, normalized by the reference
// dynamic range (default) or by the reference L2 norm.
double nrmse(const core::ComplexImage& ref, const core::ComplexImage& est,
             NrmseNorm norm = NrmseNorm::Range);

// Mean local SSIM of the magnitudes: 11x11 Gaussian window (sigma 1.5),
// K1=0.01, K2=0.03, dynamic range taken from the reference.
double ssim(const core::ComplexImage& ref, const core::ComplexImage& est);

struct MetricReport {
    double nrmse = 0.0;
    double ssim = 0.0;
    std::string case_id;
    std::string variant_id;
};

}  // namespace crimescope::metrics
