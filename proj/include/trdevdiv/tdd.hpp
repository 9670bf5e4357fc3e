#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trdevdiv/duality.hpp"
#include "trdevdiv/tensor_ops.hpp"

namespace trdevdiv {

// Closed subspace of cell-layout tensor fields over which the extremal
// constant is minimized.  All kinds exclude the identity tensor:
//   * TraceMeanZero: trace in the mean-zero (div-visible) scalar space,
//     deviatoric part unrestricted.
//   * SymmetricTraceMeanZero: additionally symmetric.
//   * NearIdentity(t): TraceMeanZero with its extremal direction w replaced
//     by (1-t) w + t id; as t -> 1 the span closes on the identity.
//   * CustomBasis: span of user fields; the identity must stay outside it.
struct SubspaceSpec {
    enum class Kind { TraceMeanZero, SymmetricTraceMeanZero, NearIdentity, CustomBasis };
    Kind kind = Kind::TraceMeanZero;
    double t = 0.0;                       // NearIdentity parameter in [0, 1)
    std::vector<TensorField> basis;       // CustomBasis fields

    static SubspaceSpec trace_mean_zero();
    static SubspaceSpec symmetric_trace_mean_zero();
    static SubspaceSpec near_identity(double t);
    static SubspaceSpec custom(std::vector<TensorField> basis);
};

std::string subspace_name(const SubspaceSpec& spec);

struct CtddEstimate {
    double s = 0.0;
    double c_hat = 0.0;          // min of (||dev||_s^2 + ||div||_{s-1}^2)^{1/2} / ||tr||_s
    TensorField extremal_tau;    // achiever of c_hat (unit trace norm)
    double proof_chain_constant = 0.0;  // n^{1+s/2} / beta
    double beta = 0.0;
    double residual_id = 0.0;    // H^s distance from id to the subspace
    int resolution = 0;
    SolverDiagnostics diagnostics;
};

struct InequalityReport {
    double s = 0.0;
    double lhs = 0.0;            // || tr tau ||_{H^s}
    double rhs_dev = 0.0;        // || dev tau ||_{H^s}
    double rhs_div = 0.0;        // || div tau ||_{H^{s-1}}
    double constant_used = 0.0;  // C
    double margin = 0.0;         // rhs_dev + rhs_div - lhs / C
    bool satisfied = false;      // margin >= -1e-12
};

// Evaluates  C^{-1} || tr tau ||_{H^s} <= || dev tau ||_{H^s} + || div tau ||_{H^{s-1}}
// for one tensor field.  C must be positive.
InequalityReport evaluate_inequality(const SpectralScale& scale, const TensorField& tau,
                                     double s, double C);

// Numerator/denominator forms of the extremal Rayleigh quotient in subspace
// coordinates: numerator(c) = ||dev tau_c||_s^2 + ||div tau_c||_{s-1}^2 and
// denominator(c) = ||tr tau_c||_s^2, both symmetric positive semidefinite.
// The coordinate convention per kind is realized by tensor_from_coords.
struct QuadraticFormPair {
    Eigen::MatrixXd numerator;
    Eigen::MatrixXd denominator;
};

QuadraticFormPair assemble_rayleigh_forms(const SpectralScale& scale, double s,
                                          const SubspaceSpec& spec, const DivLoadTable& table);

// Materializes the tensor field of one coordinate vector of the subspace
// (same convention as assemble_rayleigh_forms and estimate_ctdd).
TensorField tensor_from_coords(const SpectralScale& scale, const SubspaceSpec& spec,
                               const DivLoadTable& table, const Eigen::VectorXd& coords);

// H^s projection distance from the identity tensor to the subspace
// (Frobenius-aggregated).  CustomBasis spans are checked for linear
// independence; a singular Gram matrix throws ConfigError.
double check_id_exclusion(const SpectralScale& scale, const SubspaceSpec& spec, double s);

// Extremal constant over the subspace via the split-variable reduction:
// tau = delta + (t/n) id with delta trace-free; for each trace candidate the
// optimal delta solves a convex quadratic, and the Schur-complement pencil
// against the trace H^s form yields c_hat^2 as its smallest generalized
// eigenvalue.  Requires check_id_exclusion(spec) > 1e-8.
CtddEstimate estimate_ctdd(const SpectralScale& scale, double s, const SubspaceSpec& spec,
                           const DivLoadTable& table);
CtddEstimate estimate_ctdd(const SpectralScale& scale, double s, const SubspaceSpec& spec);

struct ProofChainReport {
    double identity_max_err = 0.0;   // worst |n^-1 <tr,div v> - (<tau,Dv> - <dev,Dv>)|
    double pairing_bound_margin = 0.0;   // min of ||div||_{s-1}||v||_{1-s} - |<div tau, v>|
    double grad_bound_margin = 0.0;      // min of n^{s/2}||dev||_s||v||_{1-s} - |<dev,Dv>|
    double conclusion_margin = 0.0;  // min of n^{s/2}||dev||_s + ||div||_{s-1}
                                     //        - |n^{-1}<tr,div v>| at unit ||v||_{1-s}
    double chain_margin = 0.0;       // min of chain_constant (||dev|| + ||div||) - ||tr||_s
    double beta = 0.0;
    double chain_constant = 0.0;     // n^{1+s/2} / beta
    bool dominance = false;          // c_hat >= beta / (sqrt2 n^{1+s/2})
    double c_hat = 0.0;
};

// Replays the constant chain on random pairs: the exact trace/divergence
// pairing identity, both intermediate bounds, and the dominance of the
// computed extremal constant over the constructive lower bound.
ProofChainReport proof_chain_verify(const SpectralScale& scale, double s,
                                    const DivLoadTable& table, std::mt19937_64& rng,
                                    int samples = 50);

// Random tensor in the given subspace (coefficients i.i.d. normal in the
// subspace coordinates).  Supported for the structured kinds.
TensorField random_in_subspace(const SpectralScale& scale, const SubspaceSpec& spec,
                               const DivLoadTable& table, std::mt19937_64& rng);

// Orthonormal constant matrices spanning the trace-free directions
// (n^2 - 1 of them, or n(n+1)/2 - 1 symmetric ones).
std::vector<Eigen::MatrixXd> trace_free_basis(int n, bool symmetric);

}  // namespace trdevdiv
