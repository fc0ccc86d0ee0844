#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crimescope/config.hpp"
#include "crimescope/pipelines.hpp"
#include "crimescope/solvers.hpp"

namespace crimescope::harness {

// Collision-resistant deterministic seed for the mask drawn for (case,
// draw_index) under a master seed; independent of execution order and
// worker count.
std::uint64_t mask_seed_for(std::uint64_t master_seed, std::uint64_t case_id,
                            std::uint64_t draw_index);

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written to
// index-addressed slots; the first exception (by index) is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

struct CaseRow {
    std::string crime;
    std::string variant;
    std::string solver;
    std::string scheme;
    int acceleration = 0;
    int case_id = 0;
    double nrmse = 0.0;
    double ssim = 0.0;
    double oracle_nrmse = 0.0;
    double effective_rate = 0.0;
    std::uint64_t seed = 0;
};

struct SummaryRow {
    std::string variant;
    std::string solver;
    std::string scheme;
    int acceleration = 0;
    double mean_nrmse = 0.0;
    double std_nrmse = 0.0;
    double mean_ssim = 0.0;
    double std_ssim = 0.0;
    int n_cases = 0;
    std::string chosen_hyperparams;
};

struct StageTime {
    std::string name;
    double seconds = 0.0;
};

struct ResultsTable {
    CrimeKind crime = CrimeKind::I;
    std::vector<CaseRow> cases;
    std::vector<SummaryRow> summary;
    std::vector<StageTime> stage_times;
};

// Per-variant hyperparameter calibration: reconstruct every calibration case
// at each grid point (fresh mask per case per grid point), return the argmin
// of the mean NRMSE. CS ties resolve to the smaller lambda; the DictL grid is
// enumerated in lexicographic parameter order and ties resolve to the first.
double calibrate_cs(const std::vector<const pipelines::PreprocessedCase*>& cal_cases,
                    const std::vector<int>& cal_ids, const sampling::SamplingPdf& pdf,
                    const std::vector<double>& lambda_grid, const solvers::CsParams& base,
                    std::uint64_t master_seed, metrics::NrmseNorm norm, int jobs);

solvers::DictlParams calibrate_dictl(
    const std::vector<const pipelines::PreprocessedCase*>& cal_cases,
    const std::vector<int>& cal_ids, const sampling::SamplingPdf& pdf, const DictlSpec& grid,
    std::uint64_t master_seed, metrics::NrmseNorm norm, int jobs);

ResultsTable run_crime1(const ExperimentConfig& config, int jobs);
ResultsTable run_crime2(const ExperimentConfig& config, int jobs);
std::vector<sampling::MaskStatsRow> run_mask_stats(const ExperimentConfig& config);

// Writes cases.csv + summary.csv (byte-stable), one SVG per metric, and a
// JSON run manifest (config hash, seed, versions, stage wall times).
void report(const ResultsTable& table, const std::string& out_dir,
            const ExperimentConfig& config);
void report_mask_stats(const std::vector<sampling::MaskStatsRow>& rows,
                       const std::string& out_dir, const ExperimentConfig& config);

std::string cases_csv_text(const std::vector<CaseRow>& rows);
std::string summary_csv_text(const std::vector<SummaryRow>& rows, CrimeKind crime);
std::vector<CaseRow> parse_cases_csv(const std::string& text);
std::vector<SummaryRow> parse_summary_csv(const std::string& text);

}  // namespace crimescope::harness
