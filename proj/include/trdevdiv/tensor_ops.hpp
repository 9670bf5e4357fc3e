#pragma once

#include <Eigen/Dense>

#include "trdevdiv/field.hpp"
#include "trdevdiv/spectral.hpp"

namespace trdevdiv {

// Pointwise sum of diagonal entries.  Entries must share a uniform layout.
ScalarField trace_field(const TensorField& tau);

// Deviatoric part dev tau = tau - (tr tau / n) id, trace-free pointwise.
TensorField dev_field(const TensorField& tau);

// Symmetrization (tau + tau^T)/2; requires a uniform layout.
TensorField sym_field(const TensorField& tau);

// Row-wise zero-extension gradient of an interior vector field.  Entry (i,j)
// is the forward difference of v_i along axis j and lives on the staggered
// layout (Cell on axis j, Interior elsewhere).
TensorField gradient_rowwise(const SpectralScale& scale, const VectorField& v);

// Single staggered derivative of an interior scalar along `axis`.
ScalarField grad_tilde_axis(const SpectralScale& scale, const ScalarField& v, int axis);

// Averages a cell field onto the staggered layout of axis j (adjacent-cell
// average along every axis except j).  This is the transfer pairing cell data
// with staggered gradient components.
ScalarField avg_to_staggered(const SpectralScale& scale, const ScalarField& g, int j);

// Averages a staggered-layout field back to cells (adjoint transfer, zero
// extension along the interior axes).
ScalarField avg_staggered_to_cell(const SpectralScale& scale, const ScalarField& f, int j);

// Neumann cell gradient component along `axis` (plain difference of adjacent
// cells; Interior along `axis`, Cell elsewhere).  Realizes the s = 1 endpoint
// identity of the cosine scale.
ScalarField grad_cell_axis(const SpectralScale& scale, const ScalarField& g, int axis);

// Divergence as the negative adjoint of gradient_rowwise: returns interior
// load densities l_i with  <div tau, v> = sum_i <l_i, v_i> = -<tau, Dv>
// exactly, for every interior v.  Accepts uniform cell-layout tensors.
VectorField divergence_rowwise(const SpectralScale& scale, const TensorField& tau);

// Interior load densities of the scalar tensor g*id (the divergence load of
// the trace part); axis component i is Db_i(Av_{!=i} g).
VectorField div_load_of_scalar(const SpectralScale& scale, const ScalarField& g);

// <tau, Dv> with tau on cells, v interior: sum over entries of the staggered
// pairing of avg_to_staggered(tau_ij, j) against (Dv)_ij.
double pair_grad(const SpectralScale& scale, const TensorField& tau, const VectorField& v);

// sum_i <dens_i, v_i> over the interior lattice.
double pair_interior(const SpectralScale& scale, const VectorField& dens, const VectorField& v);

// Frobenius-aggregated H^s norm of a uniform cell-layout tensor.
double tensor_norm_hs(const SpectralScale& scale, const TensorField& tau, double s);

// || div tau ||_{H^{s-1}}: dual norm of the divergence load.
double div_dual_norm(const SpectralScale& scale, const TensorField& tau, double s);

// Largest generalized singular value of the matrix `op` mapping the
// source_norm ellipsoid into the target_norm metric:
// sup ||op x||_target / ||x||_source.  Both norm matrices must be symmetric
// positive definite; dimension mismatches and indefinite norms throw
// ConfigError.
double operator_norm(const Eigen::MatrixXd& op, const Eigen::MatrixXd& source_norm,
                     const Eigen::MatrixXd& target_norm);

// Mode-space matrix of the axis-j load map: column m holds the sine
// coefficients of Db_j (Av_{a != j} C_m).  Assembled exactly as a Kronecker
// product of 1-D coefficient matrices; (N-1)^dim x N^dim.
Eigen::MatrixXd axis_load_matrix(const SpectralScale& scale, int axis);

// Assembled pairing matrix F of the gradient/divergence form on one grid:
// F[(i,k),(i,j,m)] = sine-mode-k coefficient of the axis-j load of cosine
// mode m placed in entry (i,j).  Rows: dim * (N-1)^dim, columns:
// dim^2 * N^dim.  Used by the order-s operator-norm checks.
Eigen::MatrixXd gradient_form_matrix(const SpectralScale& scale);

// Discrete operator norm of the row-wise gradient at order s, i.e. of
// v in H~^{1-s} against H^s-dual tensor data; bounded by dim^{s/2}.
double grad_operator_norm(const SpectralScale& scale, double s);

// Discrete operator norm of the row-wise divergence at order s, mapping H^s
// tensors to H^{s-1} loads; bounded by dim^{(1-s)/2}.
double div_operator_norm(const SpectralScale& scale, double s);

}  // namespace trdevdiv
