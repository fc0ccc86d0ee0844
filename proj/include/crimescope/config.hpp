#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crimescope/metrics.hpp"
#include "crimescope/sampling.hpp"

namespace crimescope::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CrimeKind { I, II, MaskStats };

const char* to_string(CrimeKind k);

struct CorpusSpec {
    std::string kind = "phantom";  // "phantom" | "hdf5"
    std::string path;              // hdf5 container
    int count = 30;
    Eigen::Index rows = 256;
    Eigen::Index cols = 256;
    int coils = 4;
    double snr_db = 40.0;
    std::uint64_t seed = 0;  // 0 = derive from the master seed
};

struct SplitSpec {
    int test = 20;
    int calibration = 10;
    int calibration_dictl = 5;  // the heavier grid uses fewer tuning cases
};

struct SamplingSpec {
    sampling::SchemeKind scheme = sampling::SchemeKind::StrongVd;
    int acceleration = 4;      // R; target rate = 1/R
    int power = 0;             // 0 = scheme default (weak: 7, strong: by R)
    Eigen::Index calib_rows = 6;
    Eigen::Index calib_cols = 6;

    sampling::SamplingScheme scheme_object() const;
};

struct CsSpec {
    std::vector<double> lambda_grid;  // default: 1e-9 .. 1e-1, 9 log points
    int max_iters = 200;
    double rel_tol = 1e-6;
};

struct DictlSpec {
    std::vector<int> atoms{64, 128};
    std::vector<int> sparsity{5, 9};
    std::vector<double> lambda{1e-3, 1e-2};
    std::vector<int> block{8};
    std::vector<int> outer_iters{5, 9};
    int ksvd_sweeps = 10;
    int stride = 2;
    int train_patches_cap = 10000;

    std::size_t grid_size() const {
        return atoms.size() * sparsity.size() * lambda.size() * block.size() * outer_iters.size();
    }
};

struct MaskStatsSpec {
    std::vector<sampling::SchemeKind> schemes{sampling::SchemeKind::Uniform,
                                              sampling::SchemeKind::WeakVd,
                                              sampling::SchemeKind::StrongVd};
    std::vector<double> paddings{1.0, 1.5, 2.0, 3.0};
    double target_rate = 0.17;
    int n_masks = 15;
    Eigen::Index rows = 320;
    Eigen::Index cols = 320;
    Eigen::Index calib_rows = 6;
    Eigen::Index calib_cols = 6;
};

struct ExperimentConfig {
    CrimeKind crime = CrimeKind::I;
    std::vector<double> zero_pad_variants{1.0, 1.25, 1.5, 1.75, 2.0};
    std::vector<std::optional<int>> qf_variants{std::nullopt, 75, 50, 20};
    SamplingSpec sampling;
    std::vector<std::string> solvers{"cs", "dictl"};
    CorpusSpec corpus;
    SplitSpec split;
    CsSpec cs;
    DictlSpec dictl;
    MaskStatsSpec mask_stats;
    metrics::NrmseNorm metric_norm = metrics::NrmseNorm::Range;
    std::uint64_t master_seed = 1;
    std::string out_dir = "out";

    static ExperimentConfig from_toml_text(const std::string& text);
    static ExperimentConfig from_toml_file(const std::string& path);

    // Deterministic flat serialization; hashed into the run manifest.
    std::string canonical() const;
    void validate() const;
    std::uint64_t corpus_seed() const;
};

std::string variant_label(CrimeKind crime, double zero_pad, std::optional<int> qf);

}  // namespace crimescope::harness
