#include "crimescope/solvers.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "crimescope/rng.hpp"
#include "crimescope/transforms.hpp"

namespace crimescope::solvers {

using core::BArray;

void CsParams::validate() const {
    if (lambda < 0.0) throw std::invalid_argument("CsParams: lambda must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("CsParams: max_iters must be >= 1");
    if (rel_tol < 0.0) throw std::invalid_argument("CsParams: rel_tol must be >= 0");
}

int DictlParams::effective_train_patches(Eigen::Index rows, Eigen::Index cols) const {
    if (train_patches > 0) return train_patches;
    const auto grid = ((rows + stride - 1) / stride) * ((cols + stride - 1) / stride);
    const auto want = 2 * grid;
    return static_cast<int>(std::min<Eigen::Index>(want, train_patches_cap));
}

void DictlParams::validate() const {
    if (atoms < 1 || sparsity < 1 || block < 2 || outer_iters < 1 || ksvd_sweeps < 1)
        throw std::invalid_argument("DictlParams: counts must be positive");
    if (sparsity > atoms || sparsity > block * block)
        throw std::invalid_argument("DictlParams: sparsity must be <= min(atoms, block^2)");
    if (stride < 1 || stride > block)
        throw std::invalid_argument("DictlParams: need 1 <= stride <= block");
    if (lambda < 0.0) throw std::invalid_argument("DictlParams: lambda must be >= 0");
    if (train_patches_cap < 1) throw std::invalid_argument("DictlParams: bad train cap");
}

namespace {

void check_pair(const KSpace& y, const SamplingMask& mask, const char* what) {
    if (y.rows() != mask.rows() || y.cols() != mask.cols())
        throw std::invalid_argument(std::string(what) + ": mask and k-space shapes differ");
    if (!core::all_finite(y.data))
        throw std::invalid_argument(std::string(what) + ": non-finite k-space");
}

CArray masked(const CArray& a, const BArray& m) {
    CArray out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out(i, j) = m(i, j) ? a(i, j) : Complex(0.0, 0.0);
    return out;
}

}  // namespace

ComplexImage cs_fista(const KSpace& y, const SamplingMask& mask, const CsParams& params) {
    params.validate();
    check_pair(y, mask, "cs_fista");

    const CArray ym = masked(y.data, mask.mask);
    CArray x = core::idft2_centered(ym);  // zero-filled init
    CArray z = x;
    double t = 1.0;

    for (int it = 0; it < params.max_iters; ++it) {
        CArray r = masked(core::dft2_centered(z), mask.mask) - ym;
        CArray candidate = z - core::idft2_centered(r);
        if (params.lambda > 0.0) {
            auto w = transforms::dwt2(candidate);
            w = transforms::soft_threshold(w, params.lambda);
            candidate = transforms::idwt2(w);
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / t_next;
        z = candidate + beta * (candidate - x);

        const double step = std::sqrt((candidate - x).abs2().sum());
        const double base = std::sqrt(x.abs2().sum());
        x = candidate;
        t = t_next;
        if (base > 0.0 && step / base < params.rel_tol) break;
    }
    return ComplexImage{std::move(x)};
}

Dictionary overcomplete_dct_dictionary(int block, int atoms) {
    if (block < 2 || atoms < 1) throw std::invalid_argument("dct dictionary: bad sizes");
    const int m = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(atoms))));
    Eigen::MatrixXd d1(block, m);
    for (int k = 0; k < m; ++k) {
        Eigen::VectorXd v(block);
        for (int i = 0; i < block; ++i) v(i) = std::cos(M_PI * i * k / static_cast<double>(m));
        if (k > 0) v.array() -= v.mean();
        d1.col(k) = v / v.norm();
    }
    Dictionary dict;
    dict.atoms.resize(static_cast<Eigen::Index>(block) * block, atoms);
    for (int p = 0; p < atoms; ++p) {
        const int k1 = p / m, k2 = p % m;
        Eigen::Index idx = 0;
        for (int c = 0; c < block; ++c)
            for (int r = 0; r < block; ++r)
                dict.atoms(idx++, p) = Complex(d1(r, k2) * d1(c, k1), 0.0);
        dict.atoms.col(p) /= dict.atoms.col(p).norm();
    }
    return dict;
}

SparseCode omp(const Dictionary& dict, const Eigen::MatrixXcd& signals, int sparsity) {
    if (sparsity < 1) throw std::invalid_argument("omp: sparsity must be >= 1");
    if (sparsity > dict.atom_count())
        throw std::invalid_argument("omp: sparsity exceeds atom count");
    if (signals.rows() != dict.signal_dim())
        throw std::invalid_argument("omp: signal length does not match atom length");
    constexpr double kResidualTol = 1e-10;

    const Eigen::Index n_sig = signals.cols();
    const Eigen::Index p_cnt = dict.atom_count();

    SparseCode code;
    code.atom_count = p_cnt;
    code.columns.assign(static_cast<std::size_t>(n_sig), {});

    Eigen::MatrixXcd residual = signals;
    std::vector<std::vector<int>> supports(static_cast<std::size_t>(n_sig));
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(n_sig));
    for (Eigen::Index l = 0; l < n_sig; ++l)
        if (residual.col(l).norm() >= kResidualTol) active.push_back(l);

    Eigen::MatrixXcd batch, corr;
    for (int step = 0; step < sparsity && !active.empty(); ++step) {
        batch.resize(dict.signal_dim(), static_cast<Eigen::Index>(active.size()));
        for (std::size_t a = 0; a < active.size(); ++a) batch.col(static_cast<Eigen::Index>(a)) = residual.col(active[a]);
        corr = dict.atoms.adjoint() * batch;  // P x active

        std::vector<Eigen::Index> still_active;
        still_active.reserve(active.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
            const Eigen::Index l = active[a];
            auto& sup = supports[static_cast<std::size_t>(l)];

            int best = -1;
            double best_mag = 0.0;
            for (Eigen::Index p = 0; p < p_cnt; ++p) {
                if (std::find(sup.begin(), sup.end(), static_cast<int>(p)) != sup.end()) continue;
                const double mag = std::abs(corr(p, static_cast<Eigen::Index>(a)));
                if (mag > best_mag) {  // strict > keeps the lowest index on ties
                    best_mag = mag;
                    best = static_cast<int>(p);
                }
            }
            if (best < 0) continue;
            sup.push_back(best);

            const auto k = static_cast<Eigen::Index>(sup.size());
            Eigen::MatrixXcd sub(dict.signal_dim(), k);
            for (Eigen::Index t = 0; t < k; ++t)
                sub.col(t) = dict.atoms.col(sup[static_cast<std::size_t>(t)]);
            // exact least-squares refit on the selected support
            const Eigen::MatrixXcd gram = sub.adjoint() * sub;
            const Eigen::VectorXcd rhs = sub.adjoint() * signals.col(l);
            const Eigen::VectorXcd a_fit = gram.ldlt().solve(rhs);

            residual.col(l) = signals.col(l) - sub * a_fit;

            auto& col = code.columns[static_cast<std::size_t>(l)];
            col.clear();
            for (Eigen::Index t = 0; t < k; ++t)
                col.push_back({sup[static_cast<std::size_t>(t)], a_fit(t)});

            if (residual.col(l).norm() >= kResidualTol) still_active.push_back(l);
        }
        active.swap(still_active);
    }
    return code;
}

Eigen::MatrixXcd sparse_product(const Dictionary& dict, const SparseCode& code) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dict.signal_dim(), code.signal_count());
    for (Eigen::Index l = 0; l < code.signal_count(); ++l)
        for (const auto& e : code.columns[static_cast<std::size_t>(l)])
            out.col(l) += e.coef * dict.atoms.col(e.atom);
    return out;
}

void ksvd_update(Dictionary& dict, SparseCode& code, const Eigen::MatrixXcd& signals) {
    const Eigen::Index n_sig = signals.cols();
    const Eigen::Index p_cnt = dict.atom_count();
    if (code.signal_count() != n_sig || code.atom_count != p_cnt ||
        signals.rows() != dict.signal_dim())
        throw std::invalid_argument("ksvd_update: inconsistent shapes");

    Eigen::MatrixXcd residual = signals - sparse_product(dict, code);

    // per-atom usage index: (signal, position in that signal's entry list)
    std::vector<std::vector<std::pair<Eigen::Index, std::size_t>>> usage(
        static_cast<std::size_t>(p_cnt));
    for (Eigen::Index l = 0; l < n_sig; ++l) {
        const auto& col = code.columns[static_cast<std::size_t>(l)];
        for (std::size_t e = 0; e < col.size(); ++e)
            usage[static_cast<std::size_t>(col[e].atom)].push_back({l, e});
    }

    for (Eigen::Index p = 0; p < p_cnt; ++p) {
        auto& users = usage[static_cast<std::size_t>(p)];
        if (users.empty()) {
            // replace with the worst-represented signal (ties to the lowest index)
            Eigen::Index worst = 0;
            double worst_norm = -1.0;
            for (Eigen::Index l = 0; l < n_sig; ++l) {
                const double r = residual.col(l).norm();
                if (r > worst_norm + 1e-15) {
                    worst_norm = r;
                    worst = l;
                }
            }
            const double sn = signals.col(worst).norm();
            if (sn > 0.0) dict.atoms.col(p) = signals.col(worst) / sn;
            continue;
        }

        const auto m = static_cast<Eigen::Index>(users.size());
        Eigen::MatrixXcd e_mat(dict.signal_dim(), m);
        for (Eigen::Index t = 0; t < m; ++t) {
            const auto [l, pos] = users[static_cast<std::size_t>(t)];
            e_mat.col(t) = residual.col(l) +
                           code.columns[static_cast<std::size_t>(l)][pos].coef * dict.atoms.col(p);
        }

        // leading singular pair via the (small) Hermitian Gram matrix
        const Eigen::MatrixXcd gram = e_mat * e_mat.adjoint();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
        Eigen::VectorXcd u = eig.eigenvectors().col(gram.rows() - 1);
        if (eig.eigenvalues()(gram.rows() - 1) <= 0.0) continue;  // nothing to fit

        // deterministic phase: largest-magnitude entry becomes real positive
        Eigen::Index imax = 0;
        u.cwiseAbs().maxCoeff(&imax);
        const Complex ph = u(imax) / std::abs(u(imax));
        u *= std::conj(ph);
        u /= u.norm();

        const Eigen::RowVectorXcd new_row = u.adjoint() * e_mat;  // sigma * v^H

        dict.atoms.col(p) = u;
        for (Eigen::Index t = 0; t < m; ++t) {
            const auto [l, pos] = users[static_cast<std::size_t>(t)];
            code.columns[static_cast<std::size_t>(l)][pos].coef = new_row(t);
            residual.col(l) = e_mat.col(t) - new_row(t) * u;
        }
    }
}

CArray fourier_data_update(const CArray& z, const CArray& y, const BArray& mask, double lambda) {
    if (z.rows() != y.rows() || z.cols() != y.cols() || mask.rows() != z.rows() ||
        mask.cols() != z.cols())
        throw std::invalid_argument("fourier_data_update: shape mismatch");
    CArray zf = core::dft2_centered(z);
    CArray xf(zf.rows(), zf.cols());
    const double inv = 1.0 / (1.0 + lambda);
    for (Eigen::Index j = 0; j < zf.cols(); ++j)
        for (Eigen::Index i = 0; i < zf.rows(); ++i)
            xf(i, j) = mask(i, j) ? (y(i, j) + lambda * zf(i, j)) * inv : zf(i, j);
    return core::idft2_centered(xf);
}

namespace {

// subtract per-column means; returns the removed means
Eigen::VectorXcd remove_means(Eigen::MatrixXcd& cols) {
    Eigen::VectorXcd means(cols.cols());
    for (Eigen::Index l = 0; l < cols.cols(); ++l) {
        const Complex m = cols.col(l).mean();
        means(l) = m;
        cols.col(l).array() -= m;
    }
    return means;
}

}  // namespace

ComplexImage dictl_reconstruct(const KSpace& y, const SamplingMask& mask,
                               const DictlParams& params) {
    params.validate();
    check_pair(y, mask, "dictl_reconstruct");
    const Eigen::Index h = y.rows(), w = y.cols();
    if (params.block > h || params.block > w)
        throw std::invalid_argument("dictl_reconstruct: block exceeds image");

    CArray x = core::idft2_centered(masked(y.data, mask.mask));  // zero-filled init
    Dictionary dict = overcomplete_dct_dictionary(params.block, params.atoms);

    const int n_train = params.effective_train_patches(h, w);
    rng::Stream draw(rng::mix(params.seed, 0x747261696eull));

    for (int outer = 0; outer < params.outer_iters; ++outer) {
        // (1) dictionary training on randomly drawn patches of the iterate
        std::vector<std::pair<Eigen::Index, Eigen::Index>> origins(
            static_cast<std::size_t>(n_train));
        for (auto& o : origins)
            o = {static_cast<Eigen::Index>(draw.index(static_cast<std::uint64_t>(h))),
                 static_cast<Eigen::Index>(draw.index(static_cast<std::uint64_t>(w)))};
        Eigen::MatrixXcd train = transforms::gather_patches(x, params.block, origins);
        remove_means(train);
        for (int sweep = 0; sweep < params.ksvd_sweeps; ++sweep) {
            SparseCode code = omp(dict, train, params.sparsity);
            ksvd_update(dict, code, train);
        }

        // (2) sparse-code every stride-grid patch (means removed and restored)
        transforms::PatchMatrix pm = transforms::extract_patches(x, params.block, params.stride);
        Eigen::MatrixXcd all = pm.cols;
        const Eigen::VectorXcd means = remove_means(all);
        const SparseCode code = omp(dict, all, params.sparsity);
        Eigen::MatrixXcd approx = sparse_product(dict, code);
        for (Eigen::Index l = 0; l < approx.cols(); ++l) approx.col(l).array() += means(l);

        // (3) + (4) reassemble and exact Fourier-domain data update
        const CArray z = transforms::reassemble_patches(pm, approx, h, w);
        x = fourier_data_update(z, y.data, mask.mask, params.lambda);
    }
    return ComplexImage{std::move(x)};
}

double evaluate_objective_cs(const ComplexImage& x, const KSpace& y, const SamplingMask& mask,
                             double lambda) {
    check_pair(y, mask, "evaluate_objective_cs");
    const CArray r = masked(core::dft2_centered(x.data) - y.data, mask.mask);
    const double data_term = 0.5 * r.abs2().sum();
    double l1 = 0.0;
    if (lambda > 0.0) {
        const auto wc = transforms::dwt2(x.data);
        l1 = wc.coeffs.abs().sum();
    }
    return data_term + lambda * l1;
}

double evaluate_objective_dictl(const ComplexImage& x, const ComplexImage& z, const KSpace& y,
                                const SamplingMask& mask, double lambda) {
    check_pair(y, mask, "evaluate_objective_dictl");
    const CArray r = masked(core::dft2_centered(x.data) - y.data, mask.mask);
    return 0.5 * r.abs2().sum() + 0.5 * lambda * (x.data - z.data).abs2().sum();
}

}  // namespace crimescope::solvers
