#include "crimescope/pipelines.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "crimescope/jpeg.hpp"

namespace crimescope::pipelines {

using core::CArray;
using core::Complex;
using core::RArray;

namespace {

ComplexImage combined_rss(const RawCase& raw) {
    std::vector<ComplexImage> coil_imgs;
    coil_imgs.reserve(raw.mck.coils.size());
    for (const auto& coil : raw.mck.coils) coil_imgs.push_back(core::idft2_centered(coil));
    return core::rss_combine(coil_imgs);
}

double max_real(const CArray& a) {
    double m = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) m = std::max(m, a(i, j).real());
    return m;
}

}  // namespace

std::string Provenance::to_json() const {
    nlohmann::json j;
    j["pipeline"] = pipeline;
    j["zero_pad"] = zero_pad;
    if (quality_factor)
        j["quality_factor"] = *quality_factor;
    else
        j["quality_factor"] = "NC";
    j["source_id"] = source_id;
    j["original_shape"] = {orig_rows, orig_cols};
    j["norm_scale"] = norm_scale;
    j["scale_to_8bit"] = scale_to_8bit;
    return j.dump(2);
}

Provenance Provenance::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Provenance p;
    p.pipeline = j.at("pipeline").get<std::string>();
    p.zero_pad = j.at("zero_pad").get<double>();
    const auto& qf = j.at("quality_factor");
    if (qf.is_string())
        p.quality_factor = std::nullopt;
    else
        p.quality_factor = qf.get<int>();
    p.source_id = j.at("source_id").get<std::string>();
    p.orig_rows = j.at("original_shape").at(0).get<Eigen::Index>();
    p.orig_cols = j.at("original_shape").at(1).get<Eigen::Index>();
    p.norm_scale = j.at("norm_scale").get<double>();
    p.scale_to_8bit = j.at("scale_to_8bit").get<double>();
    return p;
}

PreprocessedCase scanner_pipeline(const RawCase& raw, double zero_pad_factor) {
    if (!(zero_pad_factor >= 1.0))
        throw std::invalid_argument("scanner_pipeline: zero-pad factor must be >= 1");
    raw.mck.validate();

    const MultiCoilKSpace padded = core::zero_pad_kspace(raw.mck, zero_pad_factor);
    std::vector<ComplexImage> coil_imgs;
    coil_imgs.reserve(padded.coils.size());
    for (const auto& coil : padded.coils) coil_imgs.push_back(core::idft2_centered(coil));
    ComplexImage gold = core::rss_combine(coil_imgs);

    const double scale = max_real(gold.data);
    if (scale <= 0.0) throw std::invalid_argument("scanner_pipeline: zero image");
    gold.data /= scale;

    PreprocessedCase out;
    out.synth_kspace = synthesize_kspace(gold);
    out.gold = std::move(gold);
    out.provenance = Provenance{"scanner", zero_pad_factor, std::nullopt, raw.source_id,
                                raw.mck.rows(), raw.mck.cols(), scale, 0.0};
    return out;
}

PreprocessedCase jpeg_pipeline(const RawCase& raw, std::optional<int> quality_factor) {
    if (quality_factor && (*quality_factor < 1 || *quality_factor > 100))
        throw std::invalid_argument("jpeg_pipeline: quality factor must be NC or 1..100");
    raw.mck.validate();

    ComplexImage combined = combined_rss(raw);
    const double peak = max_real(combined.data);
    if (peak <= 0.0) throw std::invalid_argument("jpeg_pipeline: zero image");

    PreprocessedCase out;
    out.provenance = Provenance{"jpeg", 1.0,         quality_factor, raw.source_id,
                                raw.mck.rows(), raw.mck.cols(), 1.0,           0.0};
    if (!quality_factor) {
        combined.data /= peak;
        out.provenance.norm_scale = peak;
        out.gold = std::move(combined);
    } else {
        const double s8 = 255.0 / peak;
        jpeg::Gray8 img8(combined.rows(), combined.cols());
        for (Eigen::Index j = 0; j < combined.cols(); ++j)
            for (Eigen::Index i = 0; i < combined.rows(); ++i) {
                long v = std::lround(combined.data(i, j).real() * s8);
                if (v < 0) v = 0;
                if (v > 255) v = 255;
                img8(i, j) = static_cast<std::uint8_t>(v);
            }
        const jpeg::Gray8 decoded = jpeg::roundtrip(img8, *quality_factor);
        CArray gold(combined.rows(), combined.cols());
        for (Eigen::Index j = 0; j < combined.cols(); ++j)
            for (Eigen::Index i = 0; i < combined.rows(); ++i)
                gold(i, j) = Complex(static_cast<double>(decoded(i, j)) / 255.0, 0.0);
        out.provenance.scale_to_8bit = s8;
        out.gold = ComplexImage{std::move(gold)};
    }
    out.synth_kspace = synthesize_kspace(out.gold);
    return out;
}

KSpace synthesize_kspace(const ComplexImage& gold) {
    for (Eigen::Index j = 0; j < gold.cols(); ++j)
        for (Eigen::Index i = 0; i < gold.rows(); ++i) {
            const Complex v = gold.data(i, j);
            if (v.imag() != 0.0 || v.real() < 0.0)
                throw std::invalid_argument("synthesize_kspace: image must be real non-negative");
        }
    return core::dft2_centered(gold);
}

PreprocessedCase reproduce(const RawCase& raw, const Provenance& prov) {
    if (prov.pipeline == "scanner") return scanner_pipeline(raw, prov.zero_pad);
    if (prov.pipeline == "jpeg") return jpeg_pipeline(raw, prov.quality_factor);
    throw std::invalid_argument("reproduce: unknown pipeline '" + prov.pipeline + "'");
}

}  // namespace crimescope::pipelines
