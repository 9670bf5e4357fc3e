#include "trdevdiv/duality.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "trdevdiv/tensor_ops.hpp"

namespace trdevdiv {

namespace {

// Cosine coefficients of a separable cell field given one value profile per
// axis (row-major flattening, last axis fastest).
Eigen::VectorXd separable_cos_coeffs(const SpectralScale& scale,
                                     const std::vector<Eigen::VectorXd>& profiles) {
    const GridSpec& grid = scale.grid();
    const int N = grid.resolution;
    const double h = grid.spacing();
    std::vector<Eigen::VectorXd> axis_coeffs;
    axis_coeffs.reserve(profiles.size());
    for (const auto& p : profiles) axis_coeffs.push_back(h * scale.axis().BC.transpose() * p);
    const long mC = grid.full_count();
    Eigen::VectorXd out(mC);
    for (long flat = 0; flat < mC; ++flat) {
        long rem = flat;
        double prod = 1.0;
        for (int a = grid.dim - 1; a >= 0; --a) {
            prod *= axis_coeffs[static_cast<size_t>(a)][static_cast<int>(rem % N)];
            rem /= N;
        }
        out[flat] = prod;
    }
    return out;
}

}  // namespace

Eigen::MatrixXd spurious_kernel_basis(const SpectralScale& scale) {
    const GridSpec& grid = scale.grid();
    const int N = grid.resolution;
    const long mC = grid.full_count();

    Eigen::VectorXd alt(N), unit(N);
    for (int c = 0; c < N; ++c) alt[c] = (c % 2 == 0) ? 1.0 : -1.0;

    std::vector<Eigen::VectorXd> raw;
    raw.push_back(Eigen::VectorXd::Unit(mC, 0));  // constant mode coefficient
    if (grid.dim == 2) {
        raw.push_back(separable_cos_coeffs(scale, {alt, alt}));
    } else {
        // Products with an alternating profile in every axis except one free
        // axis, where any single-point profile is allowed.
        for (int jfree = 0; jfree < 3; ++jfree)
            for (int k = 0; k < N; ++k) {
                std::vector<Eigen::VectorXd> profiles(3, alt);
                profiles[static_cast<size_t>(jfree)] = Eigen::VectorXd::Unit(N, k);
                raw.push_back(separable_cos_coeffs(scale, profiles));
            }
    }

    Eigen::MatrixXd M(mC, static_cast<long>(raw.size()));
    for (size_t c = 0; c < raw.size(); ++c) M.col(static_cast<long>(c)) = raw[c];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    const long rank = qr.rank();
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(mC, rank);
    return Q;
}

DivLoadTable build_div_load_table(const SpectralScale& scale) {
    const GridSpec& grid = scale.grid();
    const long mC = grid.full_count();
    const long mS = grid.interior_count();

    DivLoadTable table;
    table.G0.resize(grid.dim * mS, mC);
    for (int j = 0; j < grid.dim; ++j)
        table.G0.middleRows(j * mS, mS) = axis_load_matrix(scale, j);

    Eigen::MatrixXd spurious = spurious_kernel_basis(scale);
    const long rank = spurious.cols();
    table.family_rank = static_cast<int>(rank - 1);

    // Orthonormal complement of the spurious block via a full QR.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(spurious);
    Eigen::MatrixXd Qfull = qr.householderQ() * Eigen::MatrixXd::Identity(mC, mC);
    table.reduction = Qfull.rightCols(mC - rank);
    return table;
}

double verify_duality_eq5(const SpectralScale& scale, const ScalarField& g, double s) {
    check_sobolev_order(s);
    const Eigen::VectorXd ghat = scale.to_cos(g);
    if (ghat.norm() == 0.0) throw ConfigError("verify_duality_eq5: zero field");
    const Eigen::VectorXd& mu = scale.neumann_eigenvalues();
    // Riesz representative of the supremum in mode space.
    Eigen::VectorXd fhat(ghat.size());
    for (long k = 0; k < ghat.size(); ++k) fhat[k] = std::pow(1.0 + mu[k], s) * ghat[k];
    double num = fhat.dot(ghat);
    double den = 0.0;
    for (long k = 0; k < ghat.size(); ++k) den += std::pow(1.0 + mu[k], -s) * fhat[k] * fhat[k];
    den = std::sqrt(den);
    const double sup = num / den;
    const double nh = scale.norm_hs(g, s);
    return std::abs(sup - nh) / nh;
}

double divsup(const SpectralScale& scale, const ScalarField& g, double s) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    require_layout(g, full_layout(grid.dim), "divsup");
    const double l2 = std::sqrt(scale.pair(g, g));
    if (std::abs(scale.mean(g)) > 1e-9 * std::max(1.0, l2))
        throw ConfigError("divsup: field must have discrete mean zero");
    VectorField dens = div_load_of_scalar(scale, g);
    double acc = 0.0;
    for (const auto& d : dens.comps) {
        const double nd = scale.norm_dual(d, s);
        acc += nd * nd;
    }
    return std::sqrt(acc);
}

InfSupEstimate estimate_infsup(const SpectralScale& scale, double s, const DivLoadTable& table) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    if (grid.resolution > 32)
        throw ConfigError("estimate_infsup: resolution is limited to 32");
    const Eigen::VectorXd& lam = scale.dirichlet_eigenvalues();
    const Eigen::VectorXd& mu = scale.neumann_eigenvalues();
    const long mS = lam.size();
    const Eigen::MatrixXd& B = table.reduction;

    // Row-weighted load form restricted to the reduced trace basis.
    Eigen::MatrixXd A = table.G0 * B;
    for (int j = 0; j < grid.dim; ++j)
        for (long k = 0; k < mS; ++k)
            A.row(j * mS + k) *= std::pow(1.0 + lam[k], (s - 1.0) / 2.0);

    Eigen::VectorXd wc(mu.size());
    for (long m = 0; m < mu.size(); ++m) wc[m] = std::pow(1.0 + mu[m], s);
    Eigen::MatrixXd Mden = B.transpose() * wc.asDiagonal() * B;

    Eigen::LLT<Eigen::MatrixXd> llt(Mden);
    if (llt.info() != Eigen::Success)
        throw SolverError("estimate_infsup: trace norm form is not positive definite");
    const Eigen::MatrixXd gram = A.transpose() * A;
    // Whiten: X = L^{-1} gram L^{-T}.
    Eigen::MatrixXd X = llt.matrixL().solve(gram);
    X = llt.matrixL().solve(X.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (X + X.transpose()));
    if (eig.info() != Eigen::Success)
        throw SolverError("estimate_infsup: eigensolver failed");

    InfSupEstimate est;
    est.s = s;
    est.resolution = grid.resolution;
    est.beta = std::sqrt(std::max(eig.eigenvalues()[0], 0.0));
    Eigen::VectorXd y = llt.matrixU().solve(eig.eigenvectors().col(0));
    est.minimizer = scale.from_cos(B * y);
    est.diagnostics.iterations = 1;
    const Eigen::VectorXd resid = gram * y - eig.eigenvalues()[0] * (Mden * y);
    est.diagnostics.residual = resid.norm() / std::max(1.0, (gram * y).norm());
    if (!(est.beta > 0.0))
        throw SolverError("estimate_infsup: degenerate pencil, beta is not positive");
    return est;
}

InfSupEstimate estimate_infsup(const SpectralScale& scale, double s) {
    return estimate_infsup(scale, s, build_div_load_table(scale));
}

ScalarField random_mean_zero(const SpectralScale& scale, const DivLoadTable& table,
                             std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd y(table.reduction.cols());
    for (long i = 0; i < y.size(); ++i) y[i] = dist(rng);
    return scale.from_cos(table.reduction * y);
}

}  // namespace trdevdiv
