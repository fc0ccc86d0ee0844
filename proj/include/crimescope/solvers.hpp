#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "crimescope/core.hpp"
#include "crimescope/sampling.hpp"

namespace crimescope::solvers {

using core::CArray;
using core::Complex;
using core::ComplexImage;
using core::KSpace;
using sampling::SamplingMask;

struct CsParams {
    double lambda = 0.0;
    int max_iters = 200;
    double rel_tol = 1e-6;

    void validate() const;
};

struct DictlParams {
    int atoms = 128;        // P
    int sparsity = 5;       // K
    double lambda = 1e-2;   // coupling weight
    int block = 8;          // b (patches are b x b)
    int outer_iters = 5;    // alternating-minimization iterations
    int ksvd_sweeps = 10;   // inner {OMP, K-SVD} alternations per outer iteration
    int stride = 2;         // patch grid stride for the image update
    int train_patches = 0;  // 0 = 2x the stride-grid patch count, capped below
    int train_patches_cap = 10000;
    std::uint64_t seed = 0; // training patch draws

    int effective_train_patches(Eigen::Index rows, Eigen::Index cols) const;
    void validate() const;
};

// Unit-norm atom columns, b^2 x P.
struct Dictionary {
    Eigen::MatrixXcd atoms;

    Eigen::Index signal_dim() const { return atoms.rows(); }
    Eigen::Index atom_count() const { return atoms.cols(); }
};

// Per-signal sparse coefficients, at most K entries per column.
struct SparseCode {
    struct Entry {
        int atom;
        Complex coef;
    };
    std::vector<std::vector<Entry>> columns;
    Eigen::Index atom_count = 0;

    Eigen::Index signal_count() const { return static_cast<Eigen::Index>(columns.size()); }
};

// FISTA for the l1-wavelet problem: step size 1 (the encoding operator has
// norm <= 1 under the unitary DFT), zero-filled initialization, standard
// momentum. Stops at max_iters or when the relative iterate change drops
// below rel_tol.
ComplexImage cs_fista(const KSpace& y, const SamplingMask& mask, const CsParams& params);

// Overcomplete DCT initialization (unit-norm, mean-removed AC atoms).
Dictionary overcomplete_dct_dictionary(int block, int atoms);

// Greedy sparse coding: atom selection by max |<residual, atom>| (ties to the
// lowest index), exact least-squares refit on the support each step, stop at
// K atoms or residual norm < 1e-10.
SparseCode omp(const Dictionary& dict, const Eigen::MatrixXcd& signals, int sparsity);

// One full K-SVD sweep in atom index order: rank-1 refit of each atom (and
// its code row) against the atom-excluded residual; unused atoms are replaced
// by the worst-represented signal.
void ksvd_update(Dictionary& dict, SparseCode& code, const Eigen::MatrixXcd& signals);

Eigen::MatrixXcd sparse_product(const Dictionary& dict, const SparseCode& code);

// Exact per-frequency minimizer of 0.5*||UFx - y||^2 + (lambda/2)*||x - z||^2:
// keeps Z on unobserved frequencies, blends (Y + lambda*Z)/(1 + lambda) on
// observed ones.
CArray fourier_data_update(const CArray& z, const CArray& y, const core::BArray& mask,
                           double lambda);

// Dictionary-learning reconstruction: alternate {train dictionary on random
// patches of the iterate, sparse-code every stride-grid patch, reassemble,
// closed-form Fourier data update}.
ComplexImage dictl_reconstruct(const KSpace& y, const SamplingMask& mask,
                               const DictlParams& params);

double evaluate_objective_cs(const ComplexImage& x, const KSpace& y, const SamplingMask& mask,
                             double lambda);
double evaluate_objective_dictl(const ComplexImage& x, const ComplexImage& z, const KSpace& y,
                                const SamplingMask& mask, double lambda);

}  // namespace crimescope::solvers
