#include <cmath>
#include <vector>

#include "crimescope/pipelines.hpp"
#include "crimescope/rng.hpp"

namespace crimescope::pipelines {

namespace {

using core::CArray;
using core::Complex;
using core::RArray;

struct Ellipse {
    double add;  // intensity increment
    double a, b; // semi-axes
    double x0, y0;
    double phi_deg;
};

// Modified Shepp-Logan intensities (values stay in [0, 1]).
const Ellipse kBase[] = {
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.80, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.20, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.20, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.10, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.10, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.10, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.10, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.10, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

std::vector<Ellipse> jittered_ellipses(rng::Stream& rs) {
    std::vector<Ellipse> out;
    bool first = true;
    for (const Ellipse& e : kBase) {
        Ellipse j = e;
        // keep the outer skull ellipse nearly fixed so interior features stay inside
        const double geo = first ? 0.01 : 0.06;
        j.a *= 1.0 + geo * (2.0 * rs.uniform() - 1.0);
        j.b *= 1.0 + geo * (2.0 * rs.uniform() - 1.0);
        if (!first) {
            j.x0 += 0.02 * (2.0 * rs.uniform() - 1.0);
            j.y0 += 0.02 * (2.0 * rs.uniform() - 1.0);
            j.phi_deg += 4.0 * (2.0 * rs.uniform() - 1.0);
        }
        j.add *= 1.0 + 0.05 * (2.0 * rs.uniform() - 1.0);
        out.push_back(j);
        first = false;
    }
    return out;
}

RArray render(const std::vector<Ellipse>& ellipses, Eigen::Index rows, Eigen::Index cols) {
    RArray img = RArray::Zero(rows, cols);
    for (const Ellipse& e : ellipses) {
        const double cphi = std::cos(e.phi_deg * M_PI / 180.0);
        const double sphi = std::sin(e.phi_deg * M_PI / 180.0);
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double x = -1.0 + 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
            for (Eigen::Index i = 0; i < rows; ++i) {
                const double y = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
                const double xr = (x - e.x0) * cphi + (y - e.y0) * sphi;
                const double yr = -(x - e.x0) * sphi + (y - e.y0) * cphi;
                if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0) img(i, j) += e.add;
            }
        }
    }
    return img.max(0.0);
}

// Low-order 2D polynomials with random complex coefficients; a dominant
// constant term keeps the pre-normalization RSS bounded away from zero.
std::vector<CArray> sensitivities(Eigen::Index rows, Eigen::Index cols, int n_coils,
                                  rng::Stream& rs) {
    std::vector<CArray> maps;
    if (n_coils == 1) {
        maps.emplace_back(CArray::Constant(rows, cols, Complex(1.0, 0.0)));
        return maps;
    }
    std::vector<std::array<Complex, 6>> coeffs(static_cast<std::size_t>(n_coils));
    for (auto& c : coeffs) {
        c[0] = Complex(1.0 + 0.25 * rs.gaussian(), 0.25 * rs.gaussian());
        for (std::size_t t = 1; t < 6; ++t) c[t] = Complex(0.35 * rs.gaussian(), 0.35 * rs.gaussian());
    }
    for (int t = 0; t < n_coils; ++t) maps.emplace_back(CArray(rows, cols));
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double x = -1.0 + 2.0 * (static_cast<double>(j) + 0.5) / static_cast<double>(cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double y = -1.0 + 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(rows);
            const double basis[6] = {1.0, x, y, x * x, x * y, y * y};
            double rss2 = 0.0;
            for (int t = 0; t < n_coils; ++t) {
                Complex v(0.0, 0.0);
                for (int k = 0; k < 6; ++k)
                    v += coeffs[static_cast<std::size_t>(t)][static_cast<std::size_t>(k)] * basis[k];
                maps[static_cast<std::size_t>(t)](i, j) = v;
                rss2 += std::norm(v);
            }
            const double inv = 1.0 / std::sqrt(rss2);
            for (int t = 0; t < n_coils; ++t) maps[static_cast<std::size_t>(t)](i, j) *= inv;
        }
    }
    return maps;
}

}  // namespace

core::RArray phantom_image(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
    rng::Stream rs(rng::mix(seed, 0x70686e746dull));
    return render(jittered_ellipses(rs), rows, cols);
}

RawCase phantom(Eigen::Index rows, Eigen::Index cols, int n_coils, std::uint64_t seed,
                double snr_db) {
    if (n_coils < 1) throw std::invalid_argument("phantom: n_coils must be >= 1");
    if (rows < 8 || cols < 8) throw std::invalid_argument("phantom: shape must be at least 8x8");

    const RArray img = phantom_image(rows, cols, seed);
    rng::Stream rs(rng::mix(seed, 0x636f696c73ull));
    const std::vector<CArray> maps = sensitivities(rows, cols, n_coils, rs);

    RawCase out;
    out.source_id = "phantom:" + std::to_string(seed);
    out.mck.coils.reserve(static_cast<std::size_t>(n_coils));
    double signal_power = 0.0;
    for (int c = 0; c < n_coils; ++c) {
        CArray coil = img.cast<Complex>() * maps[static_cast<std::size_t>(c)];
        CArray k = core::dft2_centered(coil);
        signal_power += k.abs2().sum();
        out.mck.coils.push_back(core::KSpace{std::move(k)});
    }
    signal_power /= static_cast<double>(n_coils) * static_cast<double>(rows) *
                    static_cast<double>(cols);

    if (std::isfinite(snr_db)) {
        const double sigma = std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
        const double s = sigma / std::sqrt(2.0);
        for (int c = 0; c < n_coils; ++c) {
            rng::Stream ns(rng::mix(seed, 0x6e6f697365ull, static_cast<std::uint64_t>(c)));
            CArray& k = out.mck.coils[static_cast<std::size_t>(c)].data;
            for (Eigen::Index j = 0; j < cols; ++j)
                for (Eigen::Index i = 0; i < rows; ++i)
                    k(i, j) += Complex(s * ns.gaussian(), s * ns.gaussian());
        }
    }
    return out;
}

}  // namespace crimescope::pipelines
