#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "crimescope/harness.hpp"
#include "crimescope/io.hpp"

namespace crimescope::harness {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

struct SeriesPoint {
    double mean;
    double stdev;
};

// One polyline per (solver, scheme) series; whiskers as short line segments.
std::string svg_metric_plot(const std::vector<SummaryRow>& rows,
                            const std::vector<std::string>& variants, bool use_ssim,
                            const std::string& title) {
    std::map<std::string, std::map<std::string, SeriesPoint>> series;  // series -> variant -> pt
    for (const auto& r : rows) {
        const std::string key = r.solver + "/" + r.scheme;
        series[key][r.variant] = use_ssim ? SeriesPoint{r.mean_ssim, r.std_ssim}
                                          : SeriesPoint{r.mean_nrmse, r.std_nrmse};
    }

    double lo = 1e300, hi = -1e300;
    for (const auto& [k, pts] : series)
        for (const auto& [v, p] : pts) {
            lo = std::min(lo, p.mean - p.stdev);
            hi = std::max(hi, p.mean + p.stdev);
        }
    if (!(hi > lo)) {
        hi = lo + 1.0;
    }
    const double pad = 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double width = 640, height = 420;
    const double x0 = 70, x1 = width - 30, y0 = height - 50, y1 = 30;
    auto xpos = [&](std::size_t idx) {
        if (variants.size() == 1) return (x0 + x1) / 2.0;
        return x0 + (x1 - x0) * static_cast<double>(idx) /
                        static_cast<double>(variants.size() - 1);
    };
    auto ypos = [&](double v) { return y0 - (y0 - y1) * (v - lo) / (hi - lo); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
    s << "  <text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
    s << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
      << "\" stroke=\"black\"/>\n";
    s << "  <line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
      << "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < variants.size(); ++i)
        s << "  <text x=\"" << xpos(i) << "\" y=\"" << y0 + 18
          << "\" text-anchor=\"middle\" font-size=\"11\">" << variants[i] << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double v = lo + (hi - lo) * t / 4.0;
        s << "  <text x=\"" << x0 - 8 << "\" y=\"" << ypos(v) + 4
          << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(v).substr(0, 8) << "</text>\n";
    }

    int color_idx = 0;
    for (const auto& [key, pts] : series) {
        const char* color = palette[color_idx % 5];
        std::ostringstream poly;
        for (std::size_t i = 0; i < variants.size(); ++i) {
            auto it = pts.find(variants[i]);
            if (it == pts.end()) continue;
            poly << xpos(i) << "," << ypos(it->second.mean) << " ";
            const double yl = ypos(it->second.mean - it->second.stdev);
            const double yh = ypos(it->second.mean + it->second.stdev);
            s << "  <line x1=\"" << xpos(i) << "\" y1=\"" << yl << "\" x2=\"" << xpos(i)
              << "\" y2=\"" << yh << "\" stroke=\"" << color << "\" stroke-width=\"1\"/>\n";
        }
        s << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
          << poly.str() << "\"/>\n";
        s << "  <text x=\"" << x1 - 140 << "\" y=\"" << y1 + 16 * (color_idx + 1)
          << "\" font-size=\"11\" fill=\"" << color << "\">" << key << "</text>\n";
        ++color_idx;
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace

std::string cases_csv_text(const std::vector<CaseRow>& rows) {
    std::ostringstream s;
    s << "crime,variant,solver,scheme,R,case_id,nrmse,ssim,oracle_nrmse,effective_rate,seed\n";
    for (const auto& r : rows)
        s << r.crime << ',' << r.variant << ',' << r.solver << ',' << r.scheme << ','
          << r.acceleration << ',' << r.case_id << ',' << fmt(r.nrmse) << ',' << fmt(r.ssim)
          << ',' << fmt(r.oracle_nrmse) << ',' << fmt(r.effective_rate) << ',' << r.seed << '\n';
    return s.str();
}

std::string summary_csv_text(const std::vector<SummaryRow>& rows, CrimeKind crime) {
    std::ostringstream s;
    s << "crime,variant,solver,scheme,R,mean_nrmse,std_nrmse,mean_ssim,std_ssim,n_cases,"
         "chosen_hyperparams\n";
    for (const auto& r : rows)
        s << to_string(crime) << ',' << r.variant << ',' << r.solver << ',' << r.scheme << ','
          << r.acceleration << ',' << fmt(r.mean_nrmse) << ',' << fmt(r.std_nrmse) << ','
          << fmt(r.mean_ssim) << ',' << fmt(r.std_ssim) << ',' << r.n_cases << ','
          << r.chosen_hyperparams << '\n';
    return s.str();
}

std::vector<CaseRow> parse_cases_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::vector<CaseRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("cases csv: bad field count");
        CaseRow r;
        r.crime = f[0];
        r.variant = f[1];
        r.solver = f[2];
        r.scheme = f[3];
        r.acceleration = std::stoi(f[4]);
        r.case_id = std::stoi(f[5]);
        r.nrmse = std::stod(f[6]);
        r.ssim = std::stod(f[7]);
        r.oracle_nrmse = std::stod(f[8]);
        r.effective_rate = std::stod(f[9]);
        r.seed = std::stoull(f[10]);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<SummaryRow> parse_summary_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::vector<SummaryRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 11) throw std::runtime_error("summary csv: bad field count");
        SummaryRow r;
        r.variant = f[1];
        r.solver = f[2];
        r.scheme = f[3];
        r.acceleration = std::stoi(f[4]);
        r.mean_nrmse = std::stod(f[5]);
        r.std_nrmse = std::stod(f[6]);
        r.mean_ssim = std::stod(f[7]);
        r.std_ssim = std::stod(f[8]);
        r.n_cases = std::stoi(f[9]);
        r.chosen_hyperparams = f[10];
        rows.push_back(std::move(r));
    }
    return rows;
}

void report(const ResultsTable& table, const std::string& out_dir,
            const ExperimentConfig& config) {
    if (table.cases.empty()) throw std::invalid_argument("report: empty results table");
    io::ensure_directory(out_dir);
    io::write_text_file(out_dir + "/cases.csv", cases_csv_text(table.cases));
    io::write_text_file(out_dir + "/summary.csv", summary_csv_text(table.summary, table.crime));

    std::vector<std::string> variants;
    for (const auto& r : table.summary)
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end())
            variants.push_back(r.variant);

    io::write_text_file(out_dir + "/nrmse.svg",
                        svg_metric_plot(table.summary, variants, false, "mean NRMSE vs variant"));
    io::write_text_file(out_dir + "/ssim.svg",
                        svg_metric_plot(table.summary, variants, true, "mean SSIM vs variant"));

    nlohmann::json manifest;
    manifest["config_sha256"] = io::sha256_hex(config.canonical());
    manifest["master_seed"] = config.master_seed;
    manifest["versions"] = {{"crimescope", kVersion}};
    nlohmann::json stages = nlohmann::json::object();
    for (const auto& st : table.stage_times) stages[st.name] = st.seconds;
    manifest["stage_seconds"] = stages;
    manifest["crime"] = to_string(table.crime);
    manifest["n_case_rows"] = table.cases.size();
    io::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

void report_mask_stats(const std::vector<sampling::MaskStatsRow>& rows,
                       const std::string& out_dir, const ExperimentConfig& config) {
    io::ensure_directory(out_dir);
    std::ostringstream s;
    s << "scheme,padding,target_rate,mean_effective,std_effective,n_masks\n";
    for (const auto& r : rows)
        s << sampling::to_string(r.scheme) << ',' << fmt(r.padding) << ',' << fmt(r.target_rate)
          << ',' << fmt(r.mean_effective) << ',' << fmt(r.std_effective) << ',' << r.n_masks
          << '\n';
    io::write_text_file(out_dir + "/mask_stats.csv", s.str());

    nlohmann::json manifest;
    manifest["config_sha256"] = io::sha256_hex(config.canonical());
    manifest["master_seed"] = config.master_seed;
    manifest["versions"] = {{"crimescope", kVersion}};
    manifest["crime"] = "mask-stats";
    io::write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

}  // namespace crimescope::harness
