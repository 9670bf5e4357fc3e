#pragma once

#include <random>
#include <vector>

#include "trdevdiv/duality.hpp"
#include "trdevdiv/spectral.hpp"
#include "trdevdiv/tensor_ops.hpp"

namespace trdevdiv {

// Clamped linear elasticity on the unit square (dim = 2 only), discretized
// with conforming bilinear elements on the corner-node lattice and exact
// 2x2 Gauss quadrature.  The body force is given by nodal values (including
// boundary nodes) and enters through the consistent mass matrix.
struct ElasticityProblem {
    GridSpec grid;
    double lambda = 1.0;
    double mu = 1.0;
    VectorField body_force;  // node layout, (N+1)^2 values per component

    ElasticityProblem(const GridSpec& g, double lambda_, double mu_, VectorField f);
};

struct ElasticitySolution {
    VectorField u;  // interior layout (homogeneous Dirichlet data dropped)
    SolverDiagnostics diagnostics;
    double energy_elastic = 0.0;   // 2 mu ||eps(u_h)||^2
    double energy_volumetric = 0.0;  // lambda ||div u_h||^2
    double load_work = 0.0;          // (f, u_h)
    double energy_residual = 0.0;    // |elastic + volumetric - work| / |work|
};

// Solves 2 mu (eps(u_h), eps(v)) + lambda (div u_h, div v) = (f, v) over all
// interior test fields.  Direct SPD factorization plus iterative refinement;
// relative residual above 1e-10 throws SolverError.
ElasticitySolution solve_elasticity(const ElasticityProblem& problem);

// Symmetric cell-centered strain of an interior vector field:
// eps_ij = (A_j D_j v_i + A_i D_i v_j) / 2 with the staggered row-wise
// gradient averaged back to cells.
TensorField strain(const SpectralScale& scale, const VectorField& u);

// Divergence of the bilinear displacement evaluated at cell centers (the
// H^s lattice); used for the fractional-norm sweep values.
ScalarField div_at_centers(const GridSpec& grid, const VectorField& u);

struct LambdaSweepRow {
    double lambda = 0.0;
    double s = 0.0;
    double value = 0.0;     // lambda * || div u_h ||_{H^s}
    double energy = 0.0;    // (f, u_h)
    int iterations = 0;
    double l2_div = 0.0;    // quadrature L2 norm of div u_h
    bool failed = false;
    std::string error;
};

// Solves once per lambda and records lambda * norm_hs(div u_h, s) for every
// requested order.  lambdas must be positive and sorted ascending.
std::vector<LambdaSweepRow> lambda_sweep(const GridSpec& grid, double mu,
                                         const VectorField& body_force,
                                         const std::vector<double>& lambdas,
                                         const std::vector<double>& s_values);

// Fixed smooth default body force used by the demo and the sweep checks.
VectorField default_body_force(const GridSpec& grid);

// Nodal force whose consistent load vector equals the stiffness action on
// u_star, so the discrete solution reproduces u_star exactly.
VectorField manufactured_force(const ElasticityProblem& problem, const VectorField& u_star);

// Random interior displacement projected onto the kernel of the
// center-sampled divergence; the center divergence of the result vanishes to
// machine precision.  Resolution capped at 24 (dense rank-revealing solve).
VectorField divergence_free_witness(const GridSpec& grid, std::mt19937_64& rng);

}  // namespace trdevdiv
