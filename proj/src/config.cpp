#include "crimescope/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "crimescope/io.hpp"
#include "crimescope/rng.hpp"
#include "crimescope/tomlmini.hpp"

namespace crimescope::harness {

const char* to_string(CrimeKind k) {
    switch (k) {
        case CrimeKind::I: return "crime1";
        case CrimeKind::II: return "crime2";
        case CrimeKind::MaskStats: return "mask-stats";
    }
    return "?";
}

sampling::SamplingScheme SamplingSpec::scheme_object() const {
    int p = power;
    if (p == 0) {
        if (scheme == sampling::SchemeKind::WeakVd) p = 7;
        if (scheme == sampling::SchemeKind::StrongVd) p = sampling::strong_vd_power_for(acceleration);
    }
    return {scheme, p};
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Tracks which keys were consumed so leftovers can be reported as errors.
class Reader {
public:
    explicit Reader(tomlmini::Table table) : table_(std::move(table)) {}

    bool has(const std::string& key) const { return table_.count(key) > 0; }

    template <typename Fn>
    void with(const std::string& key, Fn fn) {
        auto it = table_.find(key);
        if (it == table_.end()) return;
        consumed_.insert(key);
        try {
            fn(it->second);
        } catch (const tomlmini::ParseError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }

    void get(const std::string& key, double& out) {
        with(key, [&](const tomlmini::Value& v) { out = v.as_double(); });
    }
    void get(const std::string& key, int& out) {
        with(key, [&](const tomlmini::Value& v) { out = static_cast<int>(v.as_int()); });
    }
    void get(const std::string& key, Eigen::Index& out) {
        with(key, [&](const tomlmini::Value& v) { out = static_cast<Eigen::Index>(v.as_int()); });
    }
    void get(const std::string& key, std::uint64_t& out) {
        with(key, [&](const tomlmini::Value& v) { out = static_cast<std::uint64_t>(v.as_int()); });
    }
    void get(const std::string& key, std::string& out) {
        with(key, [&](const tomlmini::Value& v) { out = v.as_string(); });
    }
    void get(const std::string& key, std::vector<double>& out) {
        with(key, [&](const tomlmini::Value& v) {
            out.clear();
            for (const auto& e : v.as_array()) out.push_back(e.as_double());
        });
    }
    void get(const std::string& key, std::vector<int>& out) {
        with(key, [&](const tomlmini::Value& v) {
            out.clear();
            for (const auto& e : v.as_array()) out.push_back(static_cast<int>(e.as_int()));
        });
    }
    void get(const std::string& key, std::vector<std::string>& out) {
        with(key, [&](const tomlmini::Value& v) {
            out.clear();
            for (const auto& e : v.as_array()) out.push_back(e.as_string());
        });
    }

    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : table_)
            if (!consumed_.count(k)) unknown.push_back(k);
        if (!unknown.empty()) {
            std::string msg = "unknown config key(s):";
            for (const auto& k : unknown) msg += " '" + k + "'";
            throw ConfigError(msg);
        }
    }

private:
    tomlmini::Table table_;
    std::set<std::string> consumed_;
};

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int e = -9; e <= -1; ++e) g.push_back(std::pow(10.0, e));
    return g;
}

}  // namespace

std::string variant_label(CrimeKind crime, double zero_pad, std::optional<int> qf) {
    if (crime == CrimeKind::I) return fmt_double(zero_pad);
    return qf ? std::to_string(*qf) : std::string("NC");
}

ExperimentConfig ExperimentConfig::from_toml_text(const std::string& text) {
    tomlmini::Table table;
    try {
        table = tomlmini::parse(text);
    } catch (const tomlmini::ParseError& e) {
        throw ConfigError(e.what());
    }
    Reader r(std::move(table));

    ExperimentConfig cfg;
    cfg.cs.lambda_grid = default_lambda_grid();

    std::string crime = "crime1";
    r.get("experiment.crime", crime);
    if (crime == "crime1")
        cfg.crime = CrimeKind::I;
    else if (crime == "crime2")
        cfg.crime = CrimeKind::II;
    else if (crime == "mask-stats")
        cfg.crime = CrimeKind::MaskStats;
    else
        throw ConfigError("experiment.crime must be crime1, crime2 or mask-stats");

    r.get("experiment.out_dir", cfg.out_dir);
    r.get("experiment.master_seed", cfg.master_seed);
    std::string norm = "range";
    r.get("experiment.metric_norm", norm);
    try {
        cfg.metric_norm = metrics::nrmse_norm_from_string(norm);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    r.get("crime1.zero_pad", cfg.zero_pad_variants);
    r.with("crime2.qf", [&](const tomlmini::Value& v) {
        cfg.qf_variants.clear();
        for (const auto& e : v.as_array()) {
            if (e.kind == tomlmini::Value::Kind::String) {
                if (e.as_string() != "NC")
                    throw tomlmini::ParseError("qf entries must be integers or \"NC\"");
                cfg.qf_variants.push_back(std::nullopt);
            } else {
                cfg.qf_variants.push_back(static_cast<int>(e.as_int()));
            }
        }
    });

    std::string scheme = "strong_vd";
    r.get("sampling.scheme", scheme);
    try {
        cfg.sampling.scheme = sampling::scheme_from_string(scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    r.get("sampling.R", cfg.sampling.acceleration);
    r.get("sampling.power", cfg.sampling.power);
    r.get("sampling.calib_rows", cfg.sampling.calib_rows);
    r.get("sampling.calib_cols", cfg.sampling.calib_cols);

    r.get("solvers.use", cfg.solvers);

    r.get("corpus.kind", cfg.corpus.kind);
    r.get("corpus.path", cfg.corpus.path);
    r.get("corpus.count", cfg.corpus.count);
    r.get("corpus.rows", cfg.corpus.rows);
    r.get("corpus.cols", cfg.corpus.cols);
    r.get("corpus.coils", cfg.corpus.coils);
    r.get("corpus.snr_db", cfg.corpus.snr_db);
    r.get("corpus.seed", cfg.corpus.seed);

    r.get("split.test", cfg.split.test);
    r.get("split.calibration", cfg.split.calibration);
    r.get("split.calibration_dictl", cfg.split.calibration_dictl);

    r.get("cs.lambda_grid", cfg.cs.lambda_grid);
    r.get("cs.max_iters", cfg.cs.max_iters);
    r.get("cs.rel_tol", cfg.cs.rel_tol);

    r.get("dictl.atoms", cfg.dictl.atoms);
    r.get("dictl.sparsity", cfg.dictl.sparsity);
    r.get("dictl.lambda", cfg.dictl.lambda);
    r.get("dictl.block", cfg.dictl.block);
    r.get("dictl.outer_iters", cfg.dictl.outer_iters);
    r.get("dictl.ksvd_sweeps", cfg.dictl.ksvd_sweeps);
    r.get("dictl.stride", cfg.dictl.stride);
    r.get("dictl.train_patches_cap", cfg.dictl.train_patches_cap);

    r.with("mask_stats.schemes", [&](const tomlmini::Value& v) {
        cfg.mask_stats.schemes.clear();
        for (const auto& e : v.as_array())
            cfg.mask_stats.schemes.push_back(sampling::scheme_from_string(e.as_string()));
    });
    r.get("mask_stats.paddings", cfg.mask_stats.paddings);
    r.get("mask_stats.target_rate", cfg.mask_stats.target_rate);
    r.get("mask_stats.n_masks", cfg.mask_stats.n_masks);
    r.get("mask_stats.rows", cfg.mask_stats.rows);
    r.get("mask_stats.cols", cfg.mask_stats.cols);
    r.get("mask_stats.calib_rows", cfg.mask_stats.calib_rows);
    r.get("mask_stats.calib_cols", cfg.mask_stats.calib_cols);

    r.finish();
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_toml_file(const std::string& path) {
    try {
        return from_toml_text(io::read_text_file(path));
    } catch (const tomlmini::ParseError& e) {
        throw ConfigError(e.what());
    } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
    }
}

void ExperimentConfig::validate() const {
    if (crime == CrimeKind::I && zero_pad_variants.empty())
        throw ConfigError("crime1.zero_pad must not be empty");
    if (crime == CrimeKind::II && qf_variants.empty())
        throw ConfigError("crime2.qf must not be empty");
    for (double f : zero_pad_variants)
        if (!(f >= 1.0)) throw ConfigError("zero-pad factors must be >= 1");
    for (const auto& qf : qf_variants)
        if (qf && (*qf < 1 || *qf > 100)) throw ConfigError("qf values must be NC or 1..100");

    if (solvers.empty()) throw ConfigError("solvers.use must not be empty");
    for (const auto& s : solvers)
        if (s != "cs" && s != "dictl") throw ConfigError("unknown solver '" + s + "'");

    if (corpus.kind != "phantom" && corpus.kind != "hdf5")
        throw ConfigError("corpus.kind must be phantom or hdf5");
    if (corpus.kind == "hdf5" && corpus.path.empty())
        throw ConfigError("corpus.path required for hdf5 corpus");
    if (corpus.count < 1) throw ConfigError("corpus.count must be >= 1");
    if (corpus.rows < 8 || corpus.cols < 8) throw ConfigError("corpus shape must be >= 8x8");
    if (corpus.coils < 1) throw ConfigError("corpus.coils must be >= 1");

    if (split.test < 1 || split.calibration < 1)
        throw ConfigError("split.test and split.calibration must be >= 1");
    if (split.calibration_dictl < 1 || split.calibration_dictl > split.calibration)
        throw ConfigError("split.calibration_dictl must be in [1, split.calibration]");
    if (split.test + split.calibration > corpus.count)
        throw ConfigError("split.test + split.calibration exceeds corpus.count");

    if (sampling.acceleration < 1) throw ConfigError("sampling.R must be >= 1");
    if (sampling.power < 0) throw ConfigError("sampling.power must be >= 0");
    if (sampling.calib_rows < 0 || sampling.calib_cols < 0 ||
        sampling.calib_rows > corpus.rows || sampling.calib_cols > corpus.cols)
        throw ConfigError("sampling calibration block does not fit the corpus shape");

    if (cs.lambda_grid.empty()) throw ConfigError("cs.lambda_grid must not be empty");
    for (double l : cs.lambda_grid)
        if (l < 0.0) throw ConfigError("cs.lambda_grid entries must be >= 0");
    if (cs.max_iters < 1) throw ConfigError("cs.max_iters must be >= 1");

    if (dictl.grid_size() == 0) throw ConfigError("dictl grid must not be empty");
    for (int b : dictl.block)
        if (b < 2) throw ConfigError("dictl.block entries must be >= 2");
    for (int k : dictl.sparsity)
        if (k < 1) throw ConfigError("dictl.sparsity entries must be >= 1");
    for (int p : dictl.atoms)
        if (p < 1) throw ConfigError("dictl.atoms entries must be >= 1");
    for (double l : dictl.lambda)
        if (l < 0.0) throw ConfigError("dictl.lambda entries must be >= 0");
    for (int n : dictl.outer_iters)
        if (n < 1) throw ConfigError("dictl.outer_iters entries must be >= 1");
    if (dictl.ksvd_sweeps < 1 || dictl.stride < 1 || dictl.train_patches_cap < 1)
        throw ConfigError("dictl runtime knobs must be positive");

    if (mask_stats.schemes.empty() || mask_stats.paddings.empty())
        throw ConfigError("mask_stats schemes/paddings must not be empty");
    if (!(mask_stats.target_rate > 0.0 && mask_stats.target_rate <= 1.0))
        throw ConfigError("mask_stats.target_rate must be in (0,1]");
    if (mask_stats.n_masks < 1) throw ConfigError("mask_stats.n_masks must be >= 1");
}

std::uint64_t ExperimentConfig::corpus_seed() const {
    return corpus.seed != 0 ? corpus.seed : rng::mix(master_seed, 0x636f72707573ull);
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    auto put = [&](const std::string& key, const std::string& value) {
        out << key << "=" << value << "\n";
    };
    auto join_d = [&](const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt_double(v[i]);
        return s + "]";
    };
    auto join_i = [&](const std::vector<int>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + "]";
    };

    put("corpus.coils", std::to_string(corpus.coils));
    put("corpus.cols", std::to_string(corpus.cols));
    put("corpus.count", std::to_string(corpus.count));
    put("corpus.kind", corpus.kind);
    put("corpus.path", corpus.path);
    put("corpus.rows", std::to_string(corpus.rows));
    put("corpus.seed", std::to_string(corpus.seed));
    put("corpus.snr_db", fmt_double(corpus.snr_db));
    put("cs.lambda_grid", join_d(cs.lambda_grid));
    put("cs.max_iters", std::to_string(cs.max_iters));
    put("cs.rel_tol", fmt_double(cs.rel_tol));
    put("dictl.atoms", join_i(dictl.atoms));
    put("dictl.block", join_i(dictl.block));
    put("dictl.ksvd_sweeps", std::to_string(dictl.ksvd_sweeps));
    put("dictl.lambda", join_d(dictl.lambda));
    put("dictl.outer_iters", join_i(dictl.outer_iters));
    put("dictl.sparsity", join_i(dictl.sparsity));
    put("dictl.stride", std::to_string(dictl.stride));
    put("dictl.train_patches_cap", std::to_string(dictl.train_patches_cap));
    put("experiment.crime", to_string(crime));
    put("experiment.master_seed", std::to_string(master_seed));
    put("experiment.metric_norm", metrics::to_string(metric_norm));
    put("experiment.out_dir", out_dir);

    {
        std::string s = "[";
        for (std::size_t i = 0; i < mask_stats.schemes.size(); ++i)
            s += std::string(i ? "," : "") + sampling::to_string(mask_stats.schemes[i]);
        put("mask_stats.schemes", s + "]");
    }
    put("mask_stats.paddings", join_d(mask_stats.paddings));
    put("mask_stats.target_rate", fmt_double(mask_stats.target_rate));
    put("mask_stats.n_masks", std::to_string(mask_stats.n_masks));
    put("mask_stats.rows", std::to_string(mask_stats.rows));
    put("mask_stats.cols", std::to_string(mask_stats.cols));
    put("mask_stats.calib_rows", std::to_string(mask_stats.calib_rows));
    put("mask_stats.calib_cols", std::to_string(mask_stats.calib_cols));

    put("sampling.R", std::to_string(sampling.acceleration));
    put("sampling.calib_cols", std::to_string(sampling.calib_cols));
    put("sampling.calib_rows", std::to_string(sampling.calib_rows));
    put("sampling.power", std::to_string(sampling.power));
    put("sampling.scheme", sampling::to_string(sampling.scheme));

    {
        std::string s = "[";
        for (std::size_t i = 0; i < solvers.size(); ++i) s += (i ? "," : "") + solvers[i];
        put("solvers.use", s + "]");
    }
    put("split.calibration", std::to_string(split.calibration));
    put("split.calibration_dictl", std::to_string(split.calibration_dictl));
    put("split.test", std::to_string(split.test));

    {
        std::string s = "[";
        for (std::size_t i = 0; i < qf_variants.size(); ++i)
            s += std::string(i ? "," : "") +
                 (qf_variants[i] ? std::to_string(*qf_variants[i]) : std::string("NC"));
        put("crime2.qf", s + "]");
    }
    put("crime1.zero_pad", join_d(zero_pad_variants));
    return out.str();
}

}  // namespace crimescope::harness
