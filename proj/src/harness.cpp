#include "crimescope/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>

#include "crimescope/rng.hpp"

namespace crimescope::harness {

using core::ComplexImage;
using pipelines::PreprocessedCase;
using pipelines::RawCase;
using sampling::SamplingMask;
using sampling::SamplingPdf;

std::uint64_t mask_seed_for(std::uint64_t master_seed, std::uint64_t case_id,
                            std::uint64_t draw_index) {
    return rng::mix(master_seed, case_id, draw_index);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (jobs < 1) jobs = 1;
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < n; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct Corpus {
    std::vector<RawCase> cases;
    std::vector<int> cal_ids;
    std::vector<int> test_ids;
};

Corpus build_corpus(const ExperimentConfig& cfg, int jobs) {
    Corpus corpus;
    if (cfg.corpus.kind == "phantom") {
        corpus.cases.resize(static_cast<std::size_t>(cfg.corpus.count));
        const std::uint64_t seed = cfg.corpus_seed();
        parallel_for(static_cast<std::size_t>(cfg.corpus.count), jobs, [&](std::size_t i) {
            corpus.cases[i] = pipelines::phantom(cfg.corpus.rows, cfg.corpus.cols,
                                                 cfg.corpus.coils, rng::mix(seed, i),
                                                 cfg.corpus.snr_db);
        });
    } else {
        corpus.cases = pipelines::ingest_dataset(cfg.corpus.path);
        if (static_cast<int>(corpus.cases.size()) < cfg.corpus.count)
            throw std::runtime_error("corpus: container holds " +
                                     std::to_string(corpus.cases.size()) + " slices, need " +
                                     std::to_string(cfg.corpus.count));
        corpus.cases.resize(static_cast<std::size_t>(cfg.corpus.count));
    }
    // calibration and test id sets are disjoint by construction
    for (int i = 0; i < cfg.split.calibration; ++i) corpus.cal_ids.push_back(i);
    for (int i = 0; i < cfg.split.test; ++i) corpus.test_ids.push_back(cfg.split.calibration + i);
    return corpus;
}

struct VariantSpec {
    std::string label;
    double zero_pad = 1.0;
    std::optional<int> qf;
};

PreprocessedCase preprocess_case(const RawCase& raw, CrimeKind crime, const VariantSpec& v) {
    return crime == CrimeKind::I ? pipelines::scanner_pipeline(raw, v.zero_pad)
                                 : pipelines::jpeg_pipeline(raw, v.qf);
}

std::vector<PreprocessedCase> preprocess_variant(const Corpus& corpus, CrimeKind crime,
                                                 const VariantSpec& v, int jobs) {
    std::vector<PreprocessedCase> out(corpus.cases.size());
    parallel_for(corpus.cases.size(), jobs, [&](std::size_t i) {
        try {
            out[i] = preprocess_case(corpus.cases[i], crime, v);
        } catch (const std::exception& e) {
            throw std::runtime_error("case " + std::to_string(i) + " (variant " + v.label +
                                     "): " + e.what());
        }
    });
    return out;
}

SamplingPdf variant_pdf(const ExperimentConfig& cfg, Eigen::Index rows, Eigen::Index cols,
                        double pad_factor) {
    const double rate = 1.0 / static_cast<double>(cfg.sampling.acceleration);
    const sampling::Shape calib{
        static_cast<Eigen::Index>(std::llround(static_cast<double>(cfg.sampling.calib_rows) * pad_factor)),
        static_cast<Eigen::Index>(std::llround(static_cast<double>(cfg.sampling.calib_cols) * pad_factor))};
    return sampling::build_pdf({rows, cols}, cfg.sampling.scheme_object(), rate, calib);
}

solvers::DictlParams make_dictl_params(const DictlSpec& spec, int atoms, int sparsity,
                                       double lambda, int block, int outer) {
    solvers::DictlParams p;
    p.atoms = atoms;
    p.sparsity = sparsity;
    p.lambda = lambda;
    p.block = block;
    p.outer_iters = outer;
    p.ksvd_sweeps = spec.ksvd_sweeps;
    p.stride = spec.stride;
    p.train_patches_cap = spec.train_patches_cap;
    return p;
}

ComplexImage reconstruct_case(const std::string& solver, const PreprocessedCase& pc,
                              const SamplingMask& mask, double cs_lambda,
                              const solvers::CsParams& cs_base,
                              const solvers::DictlParams& dictl_params) {
    if (solver == "cs") {
        solvers::CsParams p = cs_base;
        p.lambda = cs_lambda;
        return solvers::cs_fista(pc.synth_kspace, mask, p);
    }
    return solvers::dictl_reconstruct(pc.synth_kspace, mask, dictl_params);
}

std::string dictl_params_label(const solvers::DictlParams& p) {
    return "P=" + std::to_string(p.atoms) + ";K=" + std::to_string(p.sparsity) +
           ";lambda=" + fmt(p.lambda) + ";b=" + std::to_string(p.block) +
           ";N_iter=" + std::to_string(p.outer_iters);
}

// Sinc downsampling via centered k-space crop; maps a constant image to the
// same constant, which puts the result on the base gold's intensity scale.
ComplexImage downsample_to(const ComplexImage& x, Eigen::Index rows, Eigen::Index cols) {
    if (x.rows() == rows && x.cols() == cols) return x;
    core::CArray k = core::dft2_centered(x.data);
    core::CArray kc = core::center_crop(k, rows, cols);
    const double scale = std::sqrt(static_cast<double>(rows * cols) /
                                   static_cast<double>(x.rows() * x.cols()));
    return ComplexImage{core::idft2_centered(kc) * scale};
}

class StageTimer {
public:
    explicit StageTimer(std::vector<StageTime>& sink) : sink_(sink) {}
    template <typename Fn>
    auto run(const std::string& name, Fn fn) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(name, t0);
        } else {
            auto out = fn();
            record(name, t0);
            return out;
        }
    }

private:
    void record(const std::string& name, std::chrono::steady_clock::time_point t0) {
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& st : sink_)
            if (st.name == name) {
                st.seconds += sec;
                return;
            }
        sink_.push_back({name, sec});
    }
    std::vector<StageTime>& sink_;
};

}  // namespace

double calibrate_cs(const std::vector<const PreprocessedCase*>& cal_cases,
                    const std::vector<int>& cal_ids, const SamplingPdf& pdf,
                    const std::vector<double>& lambda_grid, const solvers::CsParams& base,
                    std::uint64_t master_seed, metrics::NrmseNorm norm, int jobs) {
    if (lambda_grid.empty()) throw ConfigError("calibrate_cs: empty grid");
    if (cal_cases.empty()) throw ConfigError("calibrate_cs: no calibration cases");

    const std::size_t n_grid = lambda_grid.size(), n_cases = cal_cases.size();
    std::vector<double> errs(n_grid * n_cases);
    parallel_for(n_grid * n_cases, jobs, [&](std::size_t item) {
        const std::size_t gi = item / n_cases, ci = item % n_cases;
        const auto* pc = cal_cases[ci];
        const std::uint64_t seed = mask_seed_for(
            master_seed, static_cast<std::uint64_t>(cal_ids[ci]), 1 + gi);
        const SamplingMask mask = sampling::draw_mask(pdf, seed);
        solvers::CsParams p = base;
        p.lambda = lambda_grid[gi];
        const ComplexImage recon = solvers::cs_fista(pc->synth_kspace, mask, p);
        errs[item] = metrics::nrmse(pc->gold, recon, norm);
    });

    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < n_grid; ++gi) {
        double mean = 0.0;
        for (std::size_t ci = 0; ci < n_cases; ++ci) mean += errs[gi * n_cases + ci];
        mean /= static_cast<double>(n_cases);
        if (mean < best_err) {  // strict: ties keep the earlier (smaller) lambda
            best_err = mean;
            best = gi;
        }
    }
    return lambda_grid[best];
}

solvers::DictlParams calibrate_dictl(const std::vector<const PreprocessedCase*>& cal_cases,
                                     const std::vector<int>& cal_ids, const SamplingPdf& pdf,
                                     const DictlSpec& grid, std::uint64_t master_seed,
                                     metrics::NrmseNorm norm, int jobs) {
    if (grid.grid_size() == 0) throw ConfigError("calibrate_dictl: empty grid");
    if (cal_cases.empty()) throw ConfigError("calibrate_dictl: no calibration cases");

    std::vector<solvers::DictlParams> combos;
    for (int atoms : grid.atoms)
        for (int k : grid.sparsity)
            for (double l : grid.lambda)
                for (int b : grid.block)
                    for (int n : grid.outer_iters)
                        combos.push_back(make_dictl_params(grid, atoms, k, l, b, n));

    const std::size_t n_grid = combos.size(), n_cases = cal_cases.size();
    std::vector<double> errs(n_grid * n_cases);
    parallel_for(n_grid * n_cases, jobs, [&](std::size_t item) {
        const std::size_t gi = item / n_cases, ci = item % n_cases;
        const auto* pc = cal_cases[ci];
        const std::uint64_t seed = mask_seed_for(
            master_seed, static_cast<std::uint64_t>(cal_ids[ci]), 1 + gi);
        const SamplingMask mask = sampling::draw_mask(pdf, seed);
        solvers::DictlParams p = combos[gi];
        p.seed = rng::mix(seed, 0xd1c7ull);
        const ComplexImage recon = solvers::dictl_reconstruct(pc->synth_kspace, mask, p);
        errs[item] = metrics::nrmse(pc->gold, recon, norm);
    });

    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t gi = 0; gi < n_grid; ++gi) {
        double mean = 0.0;
        for (std::size_t ci = 0; ci < n_cases; ++ci) mean += errs[gi * n_cases + ci];
        mean /= static_cast<double>(n_cases);
        if (mean < best_err) {  // ties keep the lexicographically first combo
            best_err = mean;
            best = gi;
        }
    }
    return combos[best];
}

namespace {

ResultsTable run_crimes(const ExperimentConfig& cfg, int jobs, CrimeKind crime) {
    ResultsTable table;
    table.crime = crime;
    StageTimer timer(table.stage_times);

    Corpus corpus = timer.run("corpus", [&] { return build_corpus(cfg, jobs); });

    std::vector<VariantSpec> variants;
    if (crime == CrimeKind::I) {
        for (double f : cfg.zero_pad_variants)
            variants.push_back({variant_label(crime, f, std::nullopt), f, std::nullopt});
    } else {
        for (const auto& qf : cfg.qf_variants)
            variants.push_back({variant_label(crime, 1.0, qf), 1.0, qf});
    }

    // Baseline golds (zero-pad 1.0 / NC) for the oracle-NRMSE column.
    const VariantSpec baseline{crime == CrimeKind::I ? "1" : "NC", 1.0, std::nullopt};
    std::vector<ComplexImage> baseline_gold(corpus.cases.size());
    timer.run("preprocess", [&] {
        parallel_for(corpus.test_ids.size(), jobs, [&](std::size_t t) {
            const int id = corpus.test_ids[t];
            baseline_gold[static_cast<std::size_t>(id)] =
                preprocess_case(corpus.cases[static_cast<std::size_t>(id)], crime, baseline).gold;
        });
    });

    const std::string scheme_name = sampling::to_string(cfg.sampling.scheme);
    const bool want_cs = std::find(cfg.solvers.begin(), cfg.solvers.end(), "cs") != cfg.solvers.end();
    const bool want_dictl =
        std::find(cfg.solvers.begin(), cfg.solvers.end(), "dictl") != cfg.solvers.end();

    for (const auto& variant : variants) {
        auto pre = timer.run("preprocess",
                             [&] { return preprocess_variant(corpus, crime, variant, jobs); });
        const Eigen::Index vr = pre.front().gold.rows(), vc = pre.front().gold.cols();
        const SamplingPdf pdf =
            variant_pdf(cfg, vr, vc, crime == CrimeKind::I ? variant.zero_pad : 1.0);

        // per-variant calibration on the calibration split only
        solvers::CsParams cs_base;
        cs_base.max_iters = cfg.cs.max_iters;
        cs_base.rel_tol = cfg.cs.rel_tol;
        double cs_lambda = 0.0;
        solvers::DictlParams dictl_params;
        timer.run("calibration", [&] {
            if (want_cs) {
                std::vector<const PreprocessedCase*> cal;
                for (int id : corpus.cal_ids) cal.push_back(&pre[static_cast<std::size_t>(id)]);
                cs_lambda = calibrate_cs(cal, corpus.cal_ids, pdf, cfg.cs.lambda_grid, cs_base,
                                         cfg.master_seed, cfg.metric_norm, jobs);
            }
            if (want_dictl) {
                std::vector<const PreprocessedCase*> cal;
                std::vector<int> ids;
                for (int i = 0; i < cfg.split.calibration_dictl; ++i) {
                    ids.push_back(corpus.cal_ids[static_cast<std::size_t>(i)]);
                    cal.push_back(&pre[static_cast<std::size_t>(ids.back())]);
                }
                dictl_params = calibrate_dictl(cal, ids, pdf, cfg.dictl, cfg.master_seed,
                                               cfg.metric_norm, jobs);
            }
        });

        // evaluate every test case; one fresh mask per case, shared by solvers
        std::vector<std::vector<CaseRow>> results(corpus.test_ids.size());
        timer.run("test", [&] {
            parallel_for(corpus.test_ids.size(), jobs, [&](std::size_t t) {
                const int id = corpus.test_ids[t];
                const auto& pc = pre[static_cast<std::size_t>(id)];
                const std::uint64_t seed =
                    mask_seed_for(cfg.master_seed, static_cast<std::uint64_t>(id), 0);
                const SamplingMask mask = sampling::draw_mask(pdf, seed);
                const double eff = sampling::effective_rate(
                    mask, {corpus.cases[static_cast<std::size_t>(id)].mck.rows(),
                           corpus.cases[static_cast<std::size_t>(id)].mck.cols()});

                for (const auto& solver : cfg.solvers) {
                    try {
                        solvers::DictlParams dp = dictl_params;
                        dp.seed = rng::mix(seed, 0xd1c7ull);
                        const ComplexImage recon =
                            reconstruct_case(solver, pc, mask, cs_lambda, cs_base, dp);

                        CaseRow row;
                        row.crime = to_string(crime);
                        row.variant = variant.label;
                        row.solver = solver;
                        row.scheme = scheme_name;
                        row.acceleration = cfg.sampling.acceleration;
                        row.case_id = id;
                        row.nrmse = metrics::nrmse(pc.gold, recon, cfg.metric_norm);
                        row.ssim = metrics::ssim(pc.gold, recon);
                        const auto& base_gold = baseline_gold[static_cast<std::size_t>(id)];
                        const ComplexImage down =
                            downsample_to(recon, base_gold.rows(), base_gold.cols());
                        row.oracle_nrmse = metrics::nrmse(base_gold, down, cfg.metric_norm);
                        row.effective_rate = eff;
                        row.seed = seed;
                        results[t].push_back(std::move(row));
                    } catch (const std::exception& e) {
                        throw std::runtime_error("case " + std::to_string(id) + " (variant " +
                                                 variant.label + ", " + solver + "): " + e.what());
                    }
                }
            });
        });

        for (auto& rows : results)
            for (auto& row : rows) table.cases.push_back(std::move(row));

        for (const auto& solver : cfg.solvers) {
            SummaryRow s;
            s.variant = variant.label;
            s.solver = solver;
            s.scheme = scheme_name;
            s.acceleration = cfg.sampling.acceleration;
            std::vector<double> nr, ss;
            for (const auto& row : table.cases)
                if (row.variant == variant.label && row.solver == solver) {
                    nr.push_back(row.nrmse);
                    ss.push_back(row.ssim);
                }
            const auto stats = [](const std::vector<double>& v) {
                double mean = 0.0;
                for (double x : v) mean += x;
                mean /= static_cast<double>(v.size());
                double var = 0.0;
                for (double x : v) var += (x - mean) * (x - mean);
                var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
                return std::pair<double, double>(mean, std::sqrt(var));
            };
            std::tie(s.mean_nrmse, s.std_nrmse) = stats(nr);
            std::tie(s.mean_ssim, s.std_ssim) = stats(ss);
            s.n_cases = static_cast<int>(nr.size());
            s.chosen_hyperparams =
                solver == "cs" ? "lambda=" + fmt(cs_lambda) : dictl_params_label(dictl_params);
            table.summary.push_back(std::move(s));
        }
    }
    return table;
}

}  // namespace

ResultsTable run_crime1(const ExperimentConfig& config, int jobs) {
    if (config.crime != CrimeKind::I) throw ConfigError("run_crime1: config crime kind mismatch");
    return run_crimes(config, jobs, CrimeKind::I);
}

ResultsTable run_crime2(const ExperimentConfig& config, int jobs) {
    if (config.crime != CrimeKind::II) throw ConfigError("run_crime2: config crime kind mismatch");
    return run_crimes(config, jobs, CrimeKind::II);
}

std::vector<sampling::MaskStatsRow> run_mask_stats(const ExperimentConfig& config) {
    if (config.crime != CrimeKind::MaskStats)
        throw ConfigError("run_mask_stats: config crime kind mismatch");
    std::vector<sampling::SamplingScheme> schemes;
    for (auto kind : config.mask_stats.schemes) {
        SamplingSpec spec;
        spec.scheme = kind;
        spec.acceleration = static_cast<int>(std::lround(1.0 / config.mask_stats.target_rate));
        spec.power = config.sampling.power;
        schemes.push_back(spec.scheme_object());
    }
    return sampling::mask_statistics(schemes, config.mask_stats.paddings,
                                     config.mask_stats.target_rate, config.mask_stats.n_masks,
                                     {config.mask_stats.rows, config.mask_stats.cols},
                                     {config.mask_stats.calib_rows, config.mask_stats.calib_cols},
                                     config.master_seed);
}

}  // namespace crimescope::harness
