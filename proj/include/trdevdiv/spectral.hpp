#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trdevdiv/field.hpp"
#include "trdevdiv/grid.hpp"

namespace trdevdiv {

// One-axis building blocks for the 3-point finite-difference Laplacians with
// exact trigonometric eigenvectors on N cells of width h = 1/N:
//
//   * cosine basis (Neumann scale, cell centers):
//       C_k(c) = eta_k cos(k pi (c+1/2)/N), k = 0..N-1, eta_0 = 1, else sqrt2,
//     orthonormal under the uniform weight h; eigenvalues
//       mu_k = (4/h^2) sin^2(k pi / (2N)), exactly one zero mode (k = 0).
//   * sine basis (Dirichlet scale, interior nodes):
//       S_k(i) = sqrt2 sin(k pi i / N), k = 1..N-1, orthonormal under h;
//     eigenvalues lam_k = (4/h^2) sin^2(k pi / (2N)) > 0.
//
// Df maps interior-node values to cells by forward difference with zero
// boundary extension; Db = -Df^T maps cells to interior nodes; Av averages
// adjacent cells onto interior nodes.  These satisfy exact per-mode
// identities (see tensor_ops) that make every constant in the model sharp.
struct AxisOps {
    int N = 0;
    Eigen::MatrixXd BC;   // N x N, columns = cosine basis vectors on cells
    Eigen::MatrixXd BS;   // (N-1) x (N-1), columns = sine basis vectors
    Eigen::VectorXd mu;   // N cosine eigenvalues
    Eigen::VectorXd lam;  // N-1 sine eigenvalues
    Eigen::MatrixXd Df;   // N x (N-1): interior -> cells forward difference
    Eigen::MatrixXd Db;   // (N-1) x N: cells -> interior, Db = -Df^T
    Eigen::MatrixXd Av;   // (N-1) x N: adjacent-cell average onto interior
};

AxisOps build_axis_ops(int N);

// Immutable spectral workspace for one grid: transforms between value and
// mode space and every weighted norm in the model.  All fractional norms are
// spectral powers (1 + eigenvalue)^s of the per-axis stencil Laplacians.
class SpectralScale {
  public:
    explicit SpectralScale(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    const AxisOps& axis() const { return ops_; }

    // Tensor-sum eigenvalues, flattened row-major over modes.
    const Eigen::VectorXd& neumann_eigenvalues() const { return mu_flat_; }
    const Eigen::VectorXd& dirichlet_eigenvalues() const { return lam_flat_; }

    // Cosine transform of a cell-layout field (orthonormal coefficients) and
    // its inverse.  Throws ConfigError on layout mismatch.
    Eigen::VectorXd to_cos(const ScalarField& f) const;
    ScalarField from_cos(const Eigen::VectorXd& coeffs) const;

    // Sine transform of an interior-layout field and its inverse.
    Eigen::VectorXd to_sin(const ScalarField& f) const;
    ScalarField from_sin(const Eigen::VectorXd& coeffs) const;

    // || f ||_{H^s}: cell field, weights (1 + mu)^s.
    double norm_hs(const ScalarField& f, double s) const;
    // || v ||_{H~^s}: interior field, weights (1 + lam)^s.
    double norm_hs_tilde(const ScalarField& v, double s) const;
    // || l ||_{H^{s-1}}: dual norm of an interior load density against
    // H~^{1-s} test fields, weights (1 + lam)^{s-1}.
    double norm_dual(const ScalarField& load, double s) const;
    // || f ||_{H~^{-s}}: dual norm of a cell density against H^s, weights
    // (1 + mu)^{-s}.
    double norm_dual_cell(const ScalarField& f, double s) const;

    // Discrete L2 pairing; both fields on the same uniform lattice, weight
    // h^dim per point.
    double pair(const ScalarField& a, const ScalarField& b) const;

    // Discrete mean <f, 1> (unit measure of the hypercube).
    double mean(const ScalarField& f) const;

  private:
    GridSpec grid_;
    AxisOps ops_;
    Eigen::VectorXd mu_flat_;
    Eigen::VectorXd lam_flat_;
};

// Applies a matrix along one axis of a flat row-major array with the given
// extents; returns the new flat array (that axis resized to M.rows()).
std::vector<double> apply_axis(const Eigen::MatrixXd& M, const std::vector<double>& in,
                               const std::vector<int>& extents, int axis);

ScalarField project_mean_zero(const SpectralScale& scale, const ScalarField& f);

}  // namespace trdevdiv
