#pragma once

#include <Eigen/Dense>
#include <random>

#include "trdevdiv/spectral.hpp"

namespace trdevdiv {

// Per-grid cache of the divergence load form in mode space.  Column m of G0
// stacks, over axis blocks i, the sine coefficients of the axis-i load of
// cosine mode m; it is independent of s, so every weighted estimator reuses
// it.  `reduction` is an orthonormal basis (columns) of the mean-zero,
// div-visible coefficient subspace: the orthogonal complement of the constant
// mode together with the checkerboard family (products of per-axis
// alternating vectors in at least dim-1 axes), which the adjacent-cell
// averaging annihilates.  That family is the exact kernel of the load map,
// so the complement is precisely the subspace the divergence pairing
// resolves; the discrete mean-zero scale is defined on it.
struct DivLoadTable {
    Eigen::MatrixXd G0;         // (dim * (N-1)^dim) x N^dim
    Eigen::MatrixXd reduction;  // N^dim x (N^dim - 1 - family rank)
    int family_rank = 0;        // deflated directions beyond the constant
};

DivLoadTable build_div_load_table(const SpectralScale& scale);

// Orthonormal coefficient-space basis of the constant + checkerboard family
// (the div-invisible directions); exposed for tests.
Eigen::MatrixXd spurious_kernel_basis(const SpectralScale& scale);

struct SolverDiagnostics {
    int iterations = 0;
    double residual = 0.0;
};

struct InfSupEstimate {
    double s = 0.0;
    double beta = 0.0;
    ScalarField minimizer;  // extremal mean-zero cell field, unit H^s norm
    int resolution = 0;
    SolverDiagnostics diagnostics;
};

// Relative error of the duality identity at order s: the supremum of
// <f, g> / ||f||_{H~^{-s}} over mean-zero cell densities f, computed through
// the Riesz representative in mode space, against norm_hs(g, s).  Throws
// ConfigError on a zero field.
double verify_duality_eq5(const SpectralScale& scale, const ScalarField& g, double s);

// sup over nonzero interior v of <g, div v> / ||v||_{H~^{1-s}} for a
// mean-zero cell field g, evaluated exactly as the dual norm of the load.
// Rejects fields with non-zero discrete mean.
double divsup(const SpectralScale& scale, const ScalarField& g, double s);

// Discrete inf-sup constant at order s: the minimum of divsup(g,s)/||g||_Hs
// over the mean-zero (div-visible) scalar space, via a symmetric-definite
// generalized eigenproblem on the reduced coefficient basis.  1/beta
// estimates the right-inverse norm of the divergence in the discrete model.
InfSupEstimate estimate_infsup(const SpectralScale& scale, double s, const DivLoadTable& table);
InfSupEstimate estimate_infsup(const SpectralScale& scale, double s);

// Random field in the model's mean-zero scalar space (coefficients drawn
// i.i.d. normal in the reduced basis).
ScalarField random_mean_zero(const SpectralScale& scale, const DivLoadTable& table,
                             std::mt19937_64& rng);

}  // namespace trdevdiv
