#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crimescope/core.hpp"

namespace crimescope::pipelines {

using core::ComplexImage;
using core::KSpace;
using core::MultiCoilKSpace;

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RawCase {
    MultiCoilKSpace mck;
    std::string source_id;
};

// Everything needed to reproduce a preprocessed case from its raw source.
struct Provenance {
    std::string pipeline;                 // "scanner" | "jpeg"
    double zero_pad = 1.0;                // scanner pipeline factor
    std::optional<int> quality_factor;    // jpeg pipeline; nullopt = NC
    std::string source_id;
    Eigen::Index orig_rows = 0;
    Eigen::Index orig_cols = 0;
    double norm_scale = 1.0;              // gold = combined / norm_scale (scanner, jpeg NC)
    double scale_to_8bit = 0.0;           // img8 = round(combined * scale) (jpeg QF path)

    std::string to_json() const;
    static Provenance from_json(const std::string& text);
};

struct PreprocessedCase {
    ComplexImage gold;   // real, non-negative, max-normalized
    KSpace synth_kspace; // dft2_centered(gold)
    Provenance provenance;
};

// Commercial-scanner preprocessing: k-space zero-padding, per-coil inverse
// DFT, RSS coil combination, max normalization, then forward DFT of the
// combined image as the "fully sampled" k-space.
PreprocessedCase scanner_pipeline(const RawCase& raw, double zero_pad_factor);

// Storage preprocessing: RSS image (no padding), 8-bit quantization, baseline
// JPEG round trip at the given quality factor, rescale to [0,1], forward DFT.
// quality_factor == nullopt (NC) skips the 8-bit and JPEG steps entirely.
PreprocessedCase jpeg_pipeline(const RawCase& raw, std::optional<int> quality_factor);

// Forward DFT of a real non-negative image.
KSpace synthesize_kspace(const ComplexImage& gold);

// Re-runs the pipeline recorded in the provenance; output gold matches the
// original bit-exactly.
PreprocessedCase reproduce(const RawCase& raw, const Provenance& prov);

// Seed-jittered Shepp-Logan-style ellipse phantom with smooth synthetic coil
// sensitivities (RSS of sensitivities == 1 inside the support) and complex
// white Gaussian k-space noise at the given SNR. snr_db = +inf disables
// noise; n_coils == 1 uses the identity sensitivity.
RawCase phantom(Eigen::Index rows, Eigen::Index cols, int n_coils, std::uint64_t seed,
                double snr_db = 40.0);

// The noise-free magnitude image the phantom generator placed on the grid
// (test hook for the identity-sensitivity case).
core::RArray phantom_image(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

// HDF5 container, dataset "kspace", complex64, shape (slices, coils, H, W).
std::vector<RawCase> ingest_dataset(const std::string& path);
void for_each_slice(const std::string& path, const std::function<void(RawCase&&)>& fn);
void export_dataset(const std::string& path, const std::vector<RawCase>& cases);

}  // namespace crimescope::pipelines
