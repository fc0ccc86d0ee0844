#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "crimescope/core.hpp"

namespace crimescope::sampling {

using core::BArray;
using core::RArray;

// Requested rate cannot be met (e.g. below the forced calibration block's
// own contribution).
struct InfeasibleRateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SchemeKind { Uniform, WeakVd, StrongVd };

const char* to_string(SchemeKind kind);
SchemeKind scheme_from_string(const std::string& name);

struct SamplingScheme {
    SchemeKind kind = SchemeKind::Uniform;
    int power = 0;  // used by the VD kinds

    static SamplingScheme uniform() { return {SchemeKind::Uniform, 0}; }
    static SamplingScheme weak_vd(int p = 7) { return {SchemeKind::WeakVd, p}; }
    static SamplingScheme strong_vd(int p) { return {SchemeKind::StrongVd, p}; }
};

// Paper mapping for the strong-VD power: R in {2,3,4} -> p in {1,2,3}.
// Other acceleration factors clamp to the nearest listed value.
int strong_vd_power_for(int acceleration);

struct Shape {
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
};

// Probability map over k-space. Entries inside the calibration block are
// exactly 1; the mean equals target_rate to within 1e-4. The density is the
// variable-density profile f(r) = (1-r)^p shifted by a single additive offset
// (bisected, entries clipped to [0,1]) until the mean matches; for the
// uniform kind the profile is constant.
struct SamplingPdf {
    RArray prob;
    double target_rate = 0.0;
    Shape calib_shape;
    double offset = 0.0;  // the calibrated additive constant (diagnostic)
};

SamplingPdf build_pdf(Shape shape, SamplingScheme scheme, double target_rate, Shape calib_shape);

struct SamplingMask {
    BArray mask;  // 0/1
    std::uint64_t seed = 0;
    double realized_rate = 0.0;

    Eigen::Index rows() const { return mask.rows(); }
    Eigen::Index cols() const { return mask.cols(); }
    std::uint64_t ones() const;
};

// Independent Bernoulli(prob(i,j)) draws from a counter-based generator keyed
// by (seed, i, j); bit-identical across runs, platforms and worker counts.
// The calibration block is always fully sampled.
SamplingMask draw_mask(const SamplingPdf& pdf, std::uint64_t seed);

// Fraction of ones inside the centered original-extent block.
double effective_rate(const SamplingMask& mask, Shape original_extent);

struct MaskStatsRow {
    SchemeKind scheme;
    double padding = 1.0;
    double target_rate = 0.0;
    double mean_effective = 0.0;
    double std_effective = 0.0;  // sample standard deviation
    int n_masks = 0;
};

// Mean/std of the effective rate over n_masks independent seeds for each
// (scheme, padding factor). The mask extent and the calibration block both
// scale with the padding factor; the effective rate is always measured on
// the unpadded base extent.
std::vector<MaskStatsRow> mask_statistics(const std::vector<SamplingScheme>& schemes,
                                          const std::vector<double>& paddings, double target_rate,
                                          int n_masks, Shape base_shape, Shape base_calib,
                                          std::uint64_t master_seed);

}  // namespace crimescope::sampling
