#include "crimescope/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "crimescope/rng.hpp"

namespace crimescope::sampling {

const char* to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Uniform: return "uniform";
        case SchemeKind::WeakVd: return "weak_vd";
        case SchemeKind::StrongVd: return "strong_vd";
    }
    return "?";
}

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "uniform") return SchemeKind::Uniform;
    if (name == "weak_vd") return SchemeKind::WeakVd;
    if (name == "strong_vd") return SchemeKind::StrongVd;
    throw std::invalid_argument("unknown sampling scheme: " + name);
}

int strong_vd_power_for(int acceleration) {
    if (acceleration <= 2) return 1;
    if (acceleration == 3) return 2;
    return 3;
}

namespace {

struct CalibBlock {
    Eigen::Index r0 = 0, c0 = 0, h = 0, w = 0;
    bool contains(Eigen::Index i, Eigen::Index j) const {
        return i >= r0 && i < r0 + h && j >= c0 && j < c0 + w;
    }
};

CalibBlock calib_block(Shape shape, Shape calib) {
    CalibBlock b;
    b.h = calib.rows;
    b.w = calib.cols;
    b.r0 = (shape.rows - calib.rows) / 2;
    b.c0 = (shape.cols - calib.cols) / 2;
    return b;
}

// Base density before rate calibration. r is Euclidean distance on per-axis
// coordinates normalized to [-1, 1] (DC pixel at r = 0), clipped at 1.
RArray base_density(Shape shape, SamplingScheme scheme, double target_rate) {
    RArray f(shape.rows, shape.cols);
    if (scheme.kind == SchemeKind::Uniform) {
        f.setConstant(target_rate);
        return f;
    }
    const double cr = static_cast<double>(shape.rows / 2);
    const double cc = static_cast<double>(shape.cols / 2);
    const double dr = std::max(1.0, cr);
    const double dc = std::max(1.0, cc);
    for (Eigen::Index j = 0; j < shape.cols; ++j) {
        const double v = (static_cast<double>(j) - cc) / dc;
        for (Eigen::Index i = 0; i < shape.rows; ++i) {
            const double u = (static_cast<double>(i) - cr) / dr;
            const double r = std::min(1.0, std::sqrt(u * u + v * v));
            f(i, j) = std::pow(1.0 - r, static_cast<double>(scheme.power));
        }
    }
    return f;
}

}  // namespace

SamplingPdf build_pdf(Shape shape, SamplingScheme scheme, double target_rate, Shape calib_shape) {
    if (shape.rows < 1 || shape.cols < 1) throw std::invalid_argument("build_pdf: empty shape");
    if (!(target_rate > 0.0 && target_rate <= 1.0))
        throw std::invalid_argument("build_pdf: target_rate must be in (0, 1]");
    if (calib_shape.rows < 0 || calib_shape.cols < 0 || calib_shape.rows > shape.rows ||
        calib_shape.cols > shape.cols)
        throw std::invalid_argument("build_pdf: calibration block does not fit");
    if ((scheme.kind != SchemeKind::Uniform) && scheme.power < 1)
        throw std::invalid_argument("build_pdf: VD power must be a positive integer");

    const double n = static_cast<double>(shape.rows) * static_cast<double>(shape.cols);
    const auto blk = calib_block(shape, calib_shape);
    const double n_calib = static_cast<double>(blk.h) * static_cast<double>(blk.w);
    if (n_calib / n > target_rate + 1e-4)
        throw InfeasibleRateError("build_pdf: calibration block alone yields rate " +
                                  std::to_string(n_calib / n) + " > target " +
                                  std::to_string(target_rate));

    const RArray base = base_density(shape, scheme, target_rate);

    auto assemble = [&](double c) {
        RArray p(shape.rows, shape.cols);
        for (Eigen::Index j = 0; j < shape.cols; ++j)
            for (Eigen::Index i = 0; i < shape.rows; ++i)
                p(i, j) = blk.contains(i, j) ? 1.0 : std::clamp(base(i, j) + c, 0.0, 1.0);
        return p;
    };

    // mean(c) is continuous and non-decreasing; bisect the offset.
    double lo = -1.0, hi = 1.0;
    double c = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        c = 0.5 * (lo + hi);
        const double mean = assemble(c).mean();
        if (std::abs(mean - target_rate) < 1e-9 || hi - lo < 1e-13) break;
        if (mean < target_rate)
            lo = c;
        else
            hi = c;
    }

    SamplingPdf pdf;
    pdf.prob = assemble(c);
    pdf.target_rate = target_rate;
    pdf.calib_shape = calib_shape;
    pdf.offset = c;
    return pdf;
}

std::uint64_t SamplingMask::ones() const {
    std::uint64_t count = 0;
    for (Eigen::Index j = 0; j < mask.cols(); ++j)
        for (Eigen::Index i = 0; i < mask.rows(); ++i) count += mask(i, j);
    return count;
}

SamplingMask draw_mask(const SamplingPdf& pdf, std::uint64_t seed) {
    const Eigen::Index h = pdf.prob.rows(), w = pdf.prob.cols();
    const auto blk = calib_block({h, w}, pdf.calib_shape);
    SamplingMask m;
    m.seed = seed;
    m.mask.resize(h, w);
    for (Eigen::Index j = 0; j < w; ++j)
        for (Eigen::Index i = 0; i < h; ++i) {
            const bool forced = blk.contains(i, j);
            const double u = rng::uniform_at(seed, static_cast<std::uint64_t>(i),
                                             static_cast<std::uint64_t>(j));
            m.mask(i, j) = (forced || u < pdf.prob(i, j)) ? 1 : 0;
        }
    m.realized_rate = static_cast<double>(m.ones()) /
                      (static_cast<double>(h) * static_cast<double>(w));
    return m;
}

double effective_rate(const SamplingMask& mask, Shape original_extent) {
    if (original_extent.rows > mask.rows() || original_extent.cols > mask.cols())
        throw std::invalid_argument("effective_rate: extent larger than mask");
    if (original_extent.rows < 1 || original_extent.cols < 1)
        throw std::invalid_argument("effective_rate: empty extent");
    const Eigen::Index r0 = (mask.rows() - original_extent.rows) / 2;
    const Eigen::Index c0 = (mask.cols() - original_extent.cols) / 2;
    std::uint64_t count = 0;
    for (Eigen::Index j = c0; j < c0 + original_extent.cols; ++j)
        for (Eigen::Index i = r0; i < r0 + original_extent.rows; ++i) count += mask.mask(i, j);
    return static_cast<double>(count) /
           (static_cast<double>(original_extent.rows) * static_cast<double>(original_extent.cols));
}

std::vector<MaskStatsRow> mask_statistics(const std::vector<SamplingScheme>& schemes,
                                          const std::vector<double>& paddings, double target_rate,
                                          int n_masks, Shape base_shape, Shape base_calib,
                                          std::uint64_t master_seed) {
    if (n_masks < 1) throw std::invalid_argument("mask_statistics: n_masks must be >= 1");
    std::vector<MaskStatsRow> rows;
    for (std::size_t si = 0; si < schemes.size(); ++si) {
        for (std::size_t pi = 0; pi < paddings.size(); ++pi) {
            const double f = paddings[pi];
            const Shape shape{static_cast<Eigen::Index>(std::llround(base_shape.rows * f)),
                              static_cast<Eigen::Index>(std::llround(base_shape.cols * f))};
            const Shape calib{static_cast<Eigen::Index>(std::llround(base_calib.rows * f)),
                              static_cast<Eigen::Index>(std::llround(base_calib.cols * f))};
            const SamplingPdf pdf = build_pdf(shape, schemes[si], target_rate, calib);
            std::vector<double> eff(static_cast<std::size_t>(n_masks));
            for (int k = 0; k < n_masks; ++k) {
                const std::uint64_t seed =
                    rng::mix(master_seed, (static_cast<std::uint64_t>(si) << 32) | pi,
                             static_cast<std::uint64_t>(k));
                eff[static_cast<std::size_t>(k)] = effective_rate(draw_mask(pdf, seed), base_shape);
            }
            double mean = 0.0;
            for (double e : eff) mean += e;
            mean /= static_cast<double>(n_masks);
            double var = 0.0;
            for (double e : eff) var += (e - mean) * (e - mean);
            var = n_masks > 1 ? var / static_cast<double>(n_masks - 1) : 0.0;
            rows.push_back({schemes[si].kind, f, target_rate, mean, std::sqrt(var), n_masks});
        }
    }
    return rows;
}

}  // namespace crimescope::sampling
