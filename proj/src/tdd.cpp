#include "trdevdiv/tdd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <cstdio>
#include <limits>

namespace trdevdiv {

namespace {

Eigen::VectorXd hs_weights(const SpectralScale& scale, double s) {
    const Eigen::VectorXd& mu = scale.neumann_eigenvalues();
    Eigen::VectorXd w(mu.size());
    for (long k = 0; k < mu.size(); ++k) w[k] = std::pow(1.0 + mu[k], s);
    return w;
}

Eigen::VectorXd dual_weights(const SpectralScale& scale, double s) {
    const Eigen::VectorXd& lam = scale.dirichlet_eigenvalues();
    Eigen::VectorXd w(lam.size());
    for (long k = 0; k < lam.size(); ++k) w[k] = std::pow(1.0 + lam[k], s - 1.0);
    return w;
}

// Coordinate layout shared by the structured subspace kinds: one cosine
// coefficient block per trace-free constant matrix, then the reduced trace
// coordinates.  tau = sum_b T_b f_b + (tr/n) id with tr = reduction * y.
struct StructuredForms {
    std::vector<Eigen::MatrixXd> Tb;
    long mC = 0, mS = 0, nphi = 0, ny = 0;
    Eigen::MatrixXd Qnum;    // (nphi+ny)^2: ||dev||_s^2 + ||div||_{s-1}^2
    Eigen::MatrixXd Qden_y;  // ny^2: ||tr||_s^2
    Eigen::VectorXd wC;      // (1+mu)^s
};

StructuredForms build_structured_forms(const SpectralScale& scale, double s, bool symmetric,
                                       const DivLoadTable& table) {
    const GridSpec& grid = scale.grid();
    const int n = grid.dim;
    StructuredForms F;
    F.Tb = trace_free_basis(n, symmetric);
    F.mC = grid.full_count();
    F.mS = grid.interior_count();
    F.nphi = static_cast<long>(F.Tb.size()) * F.mC;
    F.ny = table.reduction.cols();
    F.wC = hs_weights(scale, s);
    const Eigen::VectorXd wS = dual_weights(scale, s);
    const long dim = F.nphi + F.ny;

    F.Qnum = Eigen::MatrixXd::Zero(dim, dim);
    for (size_t b = 0; b < F.Tb.size(); ++b)
        F.Qnum.diagonal().segment(static_cast<long>(b) * F.mC, F.mC) += F.wC;

    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd Li = Eigen::MatrixXd::Zero(F.mS, dim);
        for (int j = 0; j < n; ++j) {
            const Eigen::MatrixXd Aj = table.G0.middleRows(static_cast<long>(j) * F.mS, F.mS);
            for (size_t b = 0; b < F.Tb.size(); ++b)
                if (F.Tb[b](i, j) != 0.0)
                    Li.middleCols(static_cast<long>(b) * F.mC, F.mC) += F.Tb[b](i, j) * Aj;
        }
        const Eigen::MatrixXd Ai = table.G0.middleRows(static_cast<long>(i) * F.mS, F.mS);
        Li.rightCols(F.ny) += (1.0 / n) * (Ai * table.reduction);
        F.Qnum.noalias() += Li.transpose() * wS.asDiagonal() * Li;
    }
    F.Qden_y = table.reduction.transpose() * F.wC.asDiagonal() * table.reduction;
    return F;
}

TensorField structured_tensor(const SpectralScale& scale, const StructuredForms& F,
                              const DivLoadTable& table, const Eigen::VectorXd& phi,
                              const Eigen::VectorXd& y, double z_id) {
    const GridSpec& grid = scale.grid();
    const int n = grid.dim;
    TensorField tau(grid, full_layout(n), n);
    for (size_t b = 0; b < F.Tb.size(); ++b) {
        ScalarField fb = scale.from_cos(phi.segment(static_cast<long>(b) * F.mC, F.mC));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (F.Tb[b](i, j) != 0.0) {
                    ScalarField scaled = fb;
                    scaled *= F.Tb[b](i, j);
                    tau.at(i, j) += scaled;
                }
    }
    ScalarField g = scale.from_cos(table.reduction * y);
    g *= 1.0 / n;
    for (int i = 0; i < n; ++i) {
        tau.at(i, i) += g;
        if (z_id != 0.0) {
            ScalarField c = constant_field(grid, full_layout(n), z_id);
            tau.at(i, i) += c;
        }
    }
    return tau;
}

// Witness frame of the NearIdentity construction, in H^s-whitened
// coordinates zeta = (z_phi, z_y, zeta_id) where the tensor H^s norm is the
// Euclidean norm.  R maps subspace coordinates (complement of the whitened
// witness inside the trace-mean-zero block, then the tilted direction d) to
// zeta.
struct NearIdFrame {
    Eigen::MatrixXd R;           // (nz+1) x (nz-1+1)
    Eigen::MatrixXd Qn_zeta;     // numerator in zeta coordinates (nz+1)^2
    Eigen::VectorXd den_diag;    // denominator diagonal in zeta coordinates
    Eigen::VectorXd phi_scale;   // D_phi^{-1/2} diagonal (unwhitening)
    Eigen::MatrixXd y_unwhiten;  // y = y_unwhiten * z_y
    long nphi = 0, ny = 0;
};

NearIdFrame build_near_identity_frame(const SpectralScale& scale, double s, double t,
                                      const StructuredForms& F,
                                      const Eigen::VectorXd& witness_phi,
                                      const Eigen::VectorXd& witness_y) {
    const int n = scale.grid().dim;
    NearIdFrame frame;
    frame.nphi = F.nphi;
    frame.ny = F.ny;
    const long nz = F.nphi + F.ny;

    frame.phi_scale.resize(F.nphi);
    for (size_t b = 0; b < F.Tb.size(); ++b)
        for (long m = 0; m < F.mC; ++m)
            frame.phi_scale[static_cast<long>(b) * F.mC + m] = 1.0 / std::sqrt(F.wC[m]);

    Eigen::LLT<Eigen::MatrixXd> llt(F.Qden_y);
    if (llt.info() != Eigen::Success)
        throw SolverError("near-identity frame: trace norm form is not positive definite");
    // z_y = n^{-1/2} L^T y  <=>  y = sqrt(n) L^{-T} z_y.
    frame.y_unwhiten = std::sqrt(static_cast<double>(n)) *
                       Eigen::MatrixXd(llt.matrixU().solve(Eigen::MatrixXd::Identity(F.ny, F.ny)));

    // Whitened witness, normalized to unit tensor H^s norm.
    Eigen::VectorXd wz(nz);
    for (long i = 0; i < F.nphi; ++i) wz[i] = witness_phi[i] / frame.phi_scale[i];
    wz.tail(F.ny) = (1.0 / std::sqrt(static_cast<double>(n))) *
                    (Eigen::MatrixXd(llt.matrixU()) * witness_y);
    const double nw = wz.norm();
    if (nw == 0.0) throw SolverError("near-identity frame: zero witness");
    wz /= nw;

    // Euclidean (= H^s) complement of wz via a Householder QR whose first
    // column is wz.
    Eigen::MatrixXd basis(nz, nz);
    basis.col(0) = wz;
    basis.rightCols(nz - 1) = Eigen::MatrixXd::Identity(nz, nz).leftCols(nz - 1);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(nz, nz);
    Eigen::MatrixXd comp = Q.rightCols(nz - 1);

    frame.R = Eigen::MatrixXd::Zero(nz + 1, nz);
    frame.R.topLeftCorner(nz, nz - 1) = comp;
    frame.R.col(nz - 1).head(nz) = (1.0 - t) * wz;
    frame.R(nz, nz - 1) = t * std::sqrt(static_cast<double>(n));

    // Numerator congruence to whitened coordinates; the id direction carries
    // no deviatoric or divergence content.
    Eigen::MatrixXd Uw = Eigen::MatrixXd::Zero(nz, nz);
    Uw.topLeftCorner(F.nphi, F.nphi) = frame.phi_scale.asDiagonal();
    Uw.bottomRightCorner(F.ny, F.ny) = frame.y_unwhiten;
    frame.Qn_zeta = Eigen::MatrixXd::Zero(nz + 1, nz + 1);
    frame.Qn_zeta.topLeftCorner(nz, nz) = Uw.transpose() * F.Qnum * Uw;

    frame.den_diag = Eigen::VectorXd::Zero(nz + 1);
    frame.den_diag.segment(F.nphi, F.ny).setConstant(static_cast<double>(n));
    frame.den_diag[nz] = static_cast<double>(n);
    return frame;
}

// Solves min x^T Qn x / x^T Qd x over all x, where Qd may be singular: the
// denominator null directions are eliminated from the numerator by a Schur
// complement (they relax the minimum, never constrain it).  Returns the
// minimum and its coordinate vector.
std::pair<double, Eigen::VectorXd> reduced_pencil_min(const Eigen::MatrixXd& Qn,
                                                      const Eigen::MatrixXd& Qd) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> den_eig(0.5 * (Qd + Qd.transpose()));
    if (den_eig.info() != Eigen::Success)
        throw SolverError("rayleigh reduction: denominator eigensolver failed");
    const Eigen::VectorXd dvals = den_eig.eigenvalues();
    const double dmax = dvals[dvals.size() - 1];
    if (!(dmax > 0.0))
        throw ConfigError("rayleigh reduction: subspace carries no trace content");
    std::vector<long> keep, null;
    for (long i = 0; i < dvals.size(); ++i)
        (dvals[i] > 1e-11 * dmax ? keep : null).push_back(i);

    Eigen::MatrixXd Vk(Qd.rows(), static_cast<long>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) Vk.col(static_cast<long>(i)) = den_eig.eigenvectors().col(keep[i]);
    Eigen::MatrixXd S;
    Eigen::MatrixXd recover;  // null coords = recover * kept coords
    if (null.empty()) {
        S = Vk.transpose() * Qn * Vk;
    } else {
        Eigen::MatrixXd Vn(Qd.rows(), static_cast<long>(null.size()));
        for (size_t i = 0; i < null.size(); ++i)
            Vn.col(static_cast<long>(i)) = den_eig.eigenvectors().col(null[i]);
        const Eigen::MatrixXd Qn_kk = Vk.transpose() * Qn * Vk;
        const Eigen::MatrixXd Qn_kn = Vk.transpose() * Qn * Vn;
        const Eigen::MatrixXd Qn_nn = Vn.transpose() * Qn * Vn;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Qn_nn);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("rayleigh reduction: degenerate numerator block");
        recover = -ldlt.solve(Qn_kn.transpose());
        S = Qn_kk + Qn_kn * recover;
    }

    Eigen::VectorXd dh(static_cast<long>(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) dh[static_cast<long>(i)] = std::sqrt(dvals[keep[i]]);
    Eigen::MatrixXd X = S;
    for (long i = 0; i < X.rows(); ++i)
        for (long j = 0; j < X.cols(); ++j) X(i, j) /= dh[i] * dh[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (X + X.transpose()));
    if (eig.info() != Eigen::Success)
        throw SolverError("rayleigh reduction: pencil eigensolver failed");
    const double c2 = std::max(eig.eigenvalues()[0], 0.0);

    Eigen::VectorXd yk = eig.eigenvectors().col(0);
    for (long i = 0; i < yk.size(); ++i) yk[i] /= dh[i];
    Eigen::VectorXd x = Vk * yk;
    if (!null.empty()) {
        Eigen::MatrixXd Vn(Qd.rows(), static_cast<long>(null.size()));
        for (size_t i = 0; i < null.size(); ++i)
            Vn.col(static_cast<long>(i)) = den_eig.eigenvectors().col(null[i]);
        x += Vn * (recover * yk);
    }
    return {std::sqrt(c2), x};
}

void require_cell_tensor(const SpectralScale& scale, const TensorField& tau, const char* where) {
    const GridSpec& grid = scale.grid();
    if (tau.n != grid.dim)
        throw ConfigError(std::string(where) + ": tensor size does not match the grid dimension");
    for (const auto& e : tau.entries) {
        if (e.grid.dim != grid.dim || e.grid.resolution != grid.resolution)
            throw ConfigError(std::string(where) + ": tensor grid does not match the scale");
        require_layout(e, full_layout(grid.dim), where);
    }
}

// Frobenius-aggregated H^s inner product of two cell tensors.
double tensor_hs_inner(const SpectralScale& scale, const TensorField& a, const TensorField& b,
                       const Eigen::VectorXd& wC) {
    double acc = 0.0;
    for (size_t e = 0; e < a.entries.size(); ++e) {
        const Eigen::VectorXd ca = scale.to_cos(a.entries[e]);
        const Eigen::VectorXd cb = scale.to_cos(b.entries[e]);
        for (long k = 0; k < ca.size(); ++k) acc += wC[k] * ca[k] * cb[k];
    }
    return acc;
}

struct CustomForms {
    Eigen::MatrixXd Qnum;
    Eigen::MatrixXd Qden;
};

CustomForms build_custom_forms(const SpectralScale& scale, double s,
                               const std::vector<TensorField>& basis) {
    if (basis.empty()) throw ConfigError("custom subspace: empty basis");
    const long m = static_cast<long>(basis.size());
    const Eigen::VectorXd wC = hs_weights(scale, s);
    const Eigen::VectorXd wS = dual_weights(scale, s);

    std::vector<Eigen::VectorXd> tr_coeffs, dev_coeffs, load_coeffs;
    tr_coeffs.reserve(basis.size());
    for (const auto& tau : basis) {
        require_cell_tensor(scale, tau, "custom subspace");
        tr_coeffs.push_back(scale.to_cos(trace_field(tau)));
        TensorField dev = dev_field(tau);
        Eigen::VectorXd dc(static_cast<long>(dev.entries.size()) * scale.grid().full_count());
        for (size_t e = 0; e < dev.entries.size(); ++e)
            dc.segment(static_cast<long>(e) * scale.grid().full_count(),
                       scale.grid().full_count()) = scale.to_cos(dev.entries[e]);
        dev_coeffs.push_back(dc);
        VectorField dens = divergence_rowwise(scale, tau);
        Eigen::VectorXd lc(static_cast<long>(dens.comps.size()) * scale.grid().interior_count());
        for (size_t i = 0; i < dens.comps.size(); ++i)
            lc.segment(static_cast<long>(i) * scale.grid().interior_count(),
                       scale.grid().interior_count()) = scale.to_sin(dens.comps[i]);
        load_coeffs.push_back(lc);
    }

    const int n = scale.grid().dim;
    const long mC = scale.grid().full_count();
    const long mS = scale.grid().interior_count();
    CustomForms F;
    F.Qnum.resize(m, m);
    F.Qden.resize(m, m);
    for (long a = 0; a < m; ++a)
        for (long b = a; b < m; ++b) {
            double num = 0.0;
            for (int e = 0; e < n * n; ++e)
                for (long k = 0; k < mC; ++k)
                    num += wC[k] * dev_coeffs[static_cast<size_t>(a)][e * mC + k] *
                           dev_coeffs[static_cast<size_t>(b)][e * mC + k];
            for (int i = 0; i < n; ++i)
                for (long k = 0; k < mS; ++k)
                    num += wS[k] * load_coeffs[static_cast<size_t>(a)][i * mS + k] *
                           load_coeffs[static_cast<size_t>(b)][i * mS + k];
            double den = 0.0;
            for (long k = 0; k < mC; ++k)
                den += wC[k] * tr_coeffs[static_cast<size_t>(a)][k] *
                       tr_coeffs[static_cast<size_t>(b)][k];
            F.Qnum(a, b) = F.Qnum(b, a) = num;
            F.Qden(a, b) = F.Qden(b, a) = den;
        }
    return F;
}

// Structured witness at (s): the trace-mean-zero extremal in coordinates.
struct StructuredMin {
    double c_hat = 0.0;
    Eigen::VectorXd phi;
    Eigen::VectorXd y;
    double residual = 0.0;
};

StructuredMin structured_minimum(const StructuredForms& F) {
    const Eigen::MatrixXd Qpp = F.Qnum.topLeftCorner(F.nphi, F.nphi);
    const Eigen::MatrixXd Qpy = F.Qnum.topRightCorner(F.nphi, F.ny);
    const Eigen::MatrixXd Qyy = F.Qnum.bottomRightCorner(F.ny, F.ny);

    Eigen::LLT<Eigen::MatrixXd> lpp(Qpp);
    if (lpp.info() != Eigen::Success)
        throw SolverError("estimate_ctdd: deviatoric block is not positive definite");
    const Eigen::MatrixXd QppInvQpy = lpp.solve(Qpy);
    const Eigen::MatrixXd S = Qyy - Qpy.transpose() * QppInvQpy;

    Eigen::LLT<Eigen::MatrixXd> lden(F.Qden_y);
    if (lden.info() != Eigen::Success)
        throw SolverError("estimate_ctdd: trace norm form is not positive definite");
    Eigen::MatrixXd X = lden.matrixL().solve(0.5 * (S + S.transpose()));
    X = lden.matrixL().solve(X.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (X + X.transpose()));
    if (eig.info() != Eigen::Success) throw SolverError("estimate_ctdd: eigensolver failed");

    StructuredMin out;
    out.c_hat = std::sqrt(std::max(eig.eigenvalues()[0], 0.0));
    out.y = lden.matrixU().solve(eig.eigenvectors().col(0));
    out.phi = -(QppInvQpy * out.y);
    const Eigen::VectorXd sy = S * out.y;
    out.residual = (sy - eig.eigenvalues()[0] * (F.Qden_y * out.y)).norm() /
                   std::max(1.0, sy.norm());
    return out;
}

}  // namespace

SubspaceSpec SubspaceSpec::trace_mean_zero() { return SubspaceSpec{}; }

SubspaceSpec SubspaceSpec::symmetric_trace_mean_zero() {
    SubspaceSpec spec;
    spec.kind = Kind::SymmetricTraceMeanZero;
    return spec;
}

SubspaceSpec SubspaceSpec::near_identity(double t) {
    if (!(t >= 0.0 && t < 1.0))
        throw ConfigError("near-identity parameter t must lie in [0, 1)");
    SubspaceSpec spec;
    spec.kind = Kind::NearIdentity;
    spec.t = t;
    return spec;
}

SubspaceSpec SubspaceSpec::custom(std::vector<TensorField> basis) {
    SubspaceSpec spec;
    spec.kind = Kind::CustomBasis;
    spec.basis = std::move(basis);
    return spec;
}

std::string subspace_name(const SubspaceSpec& spec) {
    switch (spec.kind) {
        case SubspaceSpec::Kind::TraceMeanZero: return "trace-mean-zero";
        case SubspaceSpec::Kind::SymmetricTraceMeanZero: return "symmetric-trace-mean-zero";
        case SubspaceSpec::Kind::NearIdentity: {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "near-identity(t=%g)", spec.t);
            return buf;
        }
        case SubspaceSpec::Kind::CustomBasis:
            return "custom-basis(" + std::to_string(spec.basis.size()) + ")";
    }
    return "unknown";
}

std::vector<Eigen::MatrixXd> trace_free_basis(int n, bool symmetric) {
    if (n != 2 && n != 3) throw ConfigError("trace_free_basis: dimension must be 2 or 3");
    std::vector<Eigen::MatrixXd> out;
    for (int k = 1; k < n; ++k) {
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < k; ++i) D(i, i) = 1.0;
        D(k, k) = -static_cast<double>(k);
        out.push_back(D / std::sqrt(static_cast<double>(k * k + k)));
    }
    if (symmetric) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
                E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
                out.push_back(E);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
                E(i, j) = 1.0;
                out.push_back(E);
            }
    }
    return out;
}

InequalityReport evaluate_inequality(const SpectralScale& scale, const TensorField& tau,
                                     double s, double C) {
    check_sobolev_order(s);
    if (!(C > 0.0)) throw ConfigError("evaluate_inequality: constant must be positive");
    require_cell_tensor(scale, tau, "evaluate_inequality");
    InequalityReport rep;
    rep.s = s;
    rep.constant_used = C;
    rep.lhs = scale.norm_hs(trace_field(tau), s);
    rep.rhs_dev = tensor_norm_hs(scale, dev_field(tau), s);
    rep.rhs_div = div_dual_norm(scale, tau, s);
    rep.margin = rep.rhs_dev + rep.rhs_div - rep.lhs / C;
    rep.satisfied = rep.margin >= -1e-12;
    return rep;
}

double check_id_exclusion(const SpectralScale& scale, const SubspaceSpec& spec, double s) {
    check_sobolev_order(s);
    const int n = scale.grid().dim;
    switch (spec.kind) {
        case SubspaceSpec::Kind::TraceMeanZero:
        case SubspaceSpec::Kind::SymmetricTraceMeanZero:
            // id is H^s-orthogonal to every member: traces are mean-zero,
            // deviatoric parts are trace-free.
            return std::sqrt(static_cast<double>(n));
        case SubspaceSpec::Kind::NearIdentity: {
            if (!(spec.t >= 0.0 && spec.t < 1.0))
                throw ConfigError("near-identity parameter t must lie in [0, 1)");
            const double t = spec.t;
            const double dsq = n - (n * n * t * t) / ((1.0 - t) * (1.0 - t) + n * t * t);
            return std::sqrt(std::max(dsq, 0.0));
        }
        case SubspaceSpec::Kind::CustomBasis: {
            const Eigen::VectorXd wC = hs_weights(scale, s);
            const long m = static_cast<long>(spec.basis.size());
            if (m == 0) throw ConfigError("custom subspace: empty basis");
            Eigen::MatrixXd G(m, m);
            Eigen::VectorXd r(m);
            const TensorField id = identity_tensor(scale.grid());
            for (long a = 0; a < m; ++a) {
                require_cell_tensor(scale, spec.basis[static_cast<size_t>(a)], "custom subspace");
                r[a] = tensor_hs_inner(scale, spec.basis[static_cast<size_t>(a)], id, wC);
                for (long b = a; b < m; ++b)
                    G(a, b) = G(b, a) = tensor_hs_inner(scale, spec.basis[static_cast<size_t>(a)],
                                                        spec.basis[static_cast<size_t>(b)], wC);
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
            if (eig.info() != Eigen::Success)
                throw SolverError("check_id_exclusion: Gram eigensolver failed");
            const Eigen::VectorXd ev = eig.eigenvalues();
            if (!(ev[0] > 1e-12 * std::max(ev[ev.size() - 1], 1e-300)))
                throw ConfigError("custom subspace: basis fields are linearly dependent");
            const Eigen::VectorXd c = eig.eigenvectors() *
                                      (eig.eigenvectors().transpose() * r).cwiseQuotient(ev);
            const double dsq = static_cast<double>(n) - r.dot(c);
            return std::sqrt(std::max(dsq, 0.0));
        }
    }
    throw ConfigError("check_id_exclusion: unknown subspace kind");
}

QuadraticFormPair assemble_rayleigh_forms(const SpectralScale& scale, double s,
                                          const SubspaceSpec& spec, const DivLoadTable& table) {
    check_sobolev_order(s);
    QuadraticFormPair pair;
    switch (spec.kind) {
        case SubspaceSpec::Kind::TraceMeanZero:
        case SubspaceSpec::Kind::SymmetricTraceMeanZero: {
            const bool sym = spec.kind == SubspaceSpec::Kind::SymmetricTraceMeanZero;
            StructuredForms F = build_structured_forms(scale, s, sym, table);
            pair.numerator = std::move(F.Qnum);
            pair.denominator = Eigen::MatrixXd::Zero(F.nphi + F.ny, F.nphi + F.ny);
            pair.denominator.bottomRightCorner(F.ny, F.ny) = F.Qden_y;
            return pair;
        }
        case SubspaceSpec::Kind::NearIdentity: {
            StructuredForms F = build_structured_forms(scale, s, false, table);
            StructuredMin w = structured_minimum(F);
            NearIdFrame frame = build_near_identity_frame(scale, s, spec.t, F, w.phi, w.y);
            pair.numerator = frame.R.transpose() * frame.Qn_zeta * frame.R;
            pair.denominator = frame.R.transpose() * frame.den_diag.asDiagonal() * frame.R;
            return pair;
        }
        case SubspaceSpec::Kind::CustomBasis: {
            check_id_exclusion(scale, spec, s);  // also validates independence
            CustomForms F = build_custom_forms(scale, s, spec.basis);
            pair.numerator = std::move(F.Qnum);
            pair.denominator = std::move(F.Qden);
            return pair;
        }
    }
    throw ConfigError("assemble_rayleigh_forms: unknown subspace kind");
}

TensorField tensor_from_coords(const SpectralScale& scale, const SubspaceSpec& spec,
                               const DivLoadTable& table, const Eigen::VectorXd& coords) {
    const GridSpec& grid = scale.grid();
    switch (spec.kind) {
        case SubspaceSpec::Kind::TraceMeanZero:
        case SubspaceSpec::Kind::SymmetricTraceMeanZero: {
            const bool sym = spec.kind == SubspaceSpec::Kind::SymmetricTraceMeanZero;
            const std::vector<Eigen::MatrixXd> Tb = trace_free_basis(grid.dim, sym);
            const long mC = grid.full_count();
            const long nphi = static_cast<long>(Tb.size()) * mC;
            const long ny = table.reduction.cols();
            if (coords.size() != nphi + ny)
                throw ConfigError("tensor_from_coords: coordinate size mismatch");
            StructuredForms F;  // only fields used by structured_tensor
            F.Tb = Tb;
            F.mC = mC;
            return structured_tensor(scale, F, table, coords.head(nphi), coords.tail(ny), 0.0);
        }
        case SubspaceSpec::Kind::NearIdentity:
            // The near-identity frame depends on the order s through its
            // witness; estimate_ctdd materializes its own extremal field.
            throw ConfigError("tensor_from_coords: near-identity requires estimate_ctdd");
        case SubspaceSpec::Kind::CustomBasis: {
            if (coords.size() != static_cast<long>(spec.basis.size()))
                throw ConfigError("tensor_from_coords: coordinate size mismatch");
            TensorField out(grid, full_layout(grid.dim), grid.dim);
            for (size_t a = 0; a < spec.basis.size(); ++a)
                for (size_t e = 0; e < out.entries.size(); ++e) {
                    ScalarField scaled = spec.basis[a].entries[e];
                    scaled *= coords[static_cast<long>(a)];
                    out.entries[e] += scaled;
                }
            return out;
        }
    }
    throw ConfigError("tensor_from_coords: unknown subspace kind");
}

CtddEstimate estimate_ctdd(const SpectralScale& scale, double s, const SubspaceSpec& spec,
                           const DivLoadTable& table) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    if (grid.resolution > 32)
        throw ConfigError("estimate_ctdd: resolution is limited to 32");
    const int n = grid.dim;

    const double residual_id = check_id_exclusion(scale, spec, s);
    if (!(residual_id > 1e-8))
        throw ConfigError("identity not excluded: projection residual " +
                          std::to_string(residual_id) + " is below 1e-8");

    CtddEstimate est;
    est.s = s;
    est.resolution = grid.resolution;
    est.residual_id = residual_id;
    est.beta = estimate_infsup(scale, s, table).beta;
    est.proof_chain_constant = std::pow(static_cast<double>(n), 1.0 + s / 2.0) / est.beta;

    switch (spec.kind) {
        case SubspaceSpec::Kind::TraceMeanZero:
        case SubspaceSpec::Kind::SymmetricTraceMeanZero: {
            const bool sym = spec.kind == SubspaceSpec::Kind::SymmetricTraceMeanZero;
            StructuredForms F = build_structured_forms(scale, s, sym, table);
            StructuredMin m = structured_minimum(F);
            est.c_hat = m.c_hat;
            est.extremal_tau = structured_tensor(scale, F, table, m.phi, m.y, 0.0);
            est.diagnostics.iterations = 1;
            est.diagnostics.residual = m.residual;
            break;
        }
        case SubspaceSpec::Kind::NearIdentity: {
            StructuredForms F = build_structured_forms(scale, s, false, table);
            StructuredMin w = structured_minimum(F);
            NearIdFrame frame = build_near_identity_frame(scale, s, spec.t, F, w.phi, w.y);
            const Eigen::MatrixXd Qn = frame.R.transpose() * frame.Qn_zeta * frame.R;
            const Eigen::MatrixXd Qd =
                frame.R.transpose() * frame.den_diag.asDiagonal() * frame.R;
            auto [c, x] = reduced_pencil_min(Qn, Qd);
            est.c_hat = c;
            const Eigen::VectorXd zeta = frame.R * x;
            Eigen::VectorXd phi(frame.nphi);
            for (long i = 0; i < frame.nphi; ++i) phi[i] = frame.phi_scale[i] * zeta[i];
            const Eigen::VectorXd y = frame.y_unwhiten * zeta.segment(frame.nphi, frame.ny);
            const double z_id = zeta[frame.nphi + frame.ny] / std::sqrt(static_cast<double>(n));
            est.extremal_tau = structured_tensor(scale, F, table, phi, y, z_id);
            est.diagnostics.iterations = 1;
            est.diagnostics.residual = (Qn * x - c * c * (Qd * x)).norm() /
                                       std::max(1.0, (Qn * x).norm());
            break;
        }
        case SubspaceSpec::Kind::CustomBasis: {
            CustomForms F = build_custom_forms(scale, s, spec.basis);
            auto [c, x] = reduced_pencil_min(F.Qnum, F.Qden);
            est.c_hat = c;
            est.extremal_tau = tensor_from_coords(scale, spec, table, x);
            est.diagnostics.iterations = 1;
            est.diagnostics.residual = (F.Qnum * x - c * c * (F.Qden * x)).norm() /
                                       std::max(1.0, (F.Qnum * x).norm());
            break;
        }
    }
    return est;
}

CtddEstimate estimate_ctdd(const SpectralScale& scale, double s, const SubspaceSpec& spec) {
    return estimate_ctdd(scale, s, spec, build_div_load_table(scale));
}

TensorField random_in_subspace(const SpectralScale& scale, const SubspaceSpec& spec,
                               const DivLoadTable& table, std::mt19937_64& rng) {
    const GridSpec& grid = scale.grid();
    if (spec.kind != SubspaceSpec::Kind::TraceMeanZero &&
        spec.kind != SubspaceSpec::Kind::SymmetricTraceMeanZero)
        throw ConfigError("random_in_subspace: supported for the structured kinds only");
    const bool sym = spec.kind == SubspaceSpec::Kind::SymmetricTraceMeanZero;
    const long nphi = static_cast<long>(trace_free_basis(grid.dim, sym).size()) * grid.full_count();
    const long ny = table.reduction.cols();
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd coords(nphi + ny);
    for (long i = 0; i < coords.size(); ++i) coords[i] = dist(rng);
    return tensor_from_coords(scale, spec, table, coords);
}

ProofChainReport proof_chain_verify(const SpectralScale& scale, double s,
                                    const DivLoadTable& table, std::mt19937_64& rng,
                                    int samples) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    const int n = grid.dim;
    ProofChainReport rep;
    rep.identity_max_err = 0.0;
    rep.pairing_bound_margin = std::numeric_limits<double>::infinity();
    rep.grad_bound_margin = std::numeric_limits<double>::infinity();
    rep.conclusion_margin = std::numeric_limits<double>::infinity();
    rep.chain_margin = std::numeric_limits<double>::infinity();

    const SubspaceSpec tmz = SubspaceSpec::trace_mean_zero();
    CtddEstimate est = estimate_ctdd(scale, s, tmz, table);
    rep.beta = est.beta;
    rep.chain_constant = est.proof_chain_constant;
    rep.c_hat = est.c_hat;
    rep.dominance =
        est.c_hat >= rep.beta / (std::sqrt(2.0) * std::pow(static_cast<double>(n), 1.0 + s / 2.0)) -
                         1e-12;

    for (int t = 0; t < samples; ++t) {
        TensorField tau = random_in_subspace(scale, tmz, table, rng);
        VectorField v = random_vector(grid, interior_layout(n), rng);

        const TensorField dev = dev_field(tau);
        const ScalarField tr = trace_field(tau);
        const double a = pair_grad(scale, tau, v);
        const double b = pair_grad(scale, dev, v);
        const double c = pair_interior(scale, div_load_of_scalar(scale, tr), v);
        rep.identity_max_err =
            std::max(rep.identity_max_err, std::abs(a - b + c / n) / std::max(1.0, std::abs(a)));

        double vt2 = 0.0;
        for (const auto& vc : v.comps) {
            const double nv = scale.norm_hs_tilde(vc, 1.0 - s);
            vt2 += nv * nv;
        }
        const double vt = std::sqrt(vt2);
        const double dev_n = tensor_norm_hs(scale, dev, s);
        const double div_n = div_dual_norm(scale, tau, s);
        const double tr_n = scale.norm_hs(tr, s);
        const double grad_factor = std::pow(static_cast<double>(n), s / 2.0);

        const double p = pair_interior(scale, divergence_rowwise(scale, tau), v);
        rep.pairing_bound_margin =
            std::min(rep.pairing_bound_margin, div_n * vt - std::abs(p));
        rep.grad_bound_margin =
            std::min(rep.grad_bound_margin, grad_factor * dev_n * vt - std::abs(b));
        rep.conclusion_margin = std::min(
            rep.conclusion_margin, grad_factor * dev_n + div_n - std::abs(c / n) / vt);
        rep.chain_margin =
            std::min(rep.chain_margin, rep.chain_constant * (dev_n + div_n) - tr_n);
    }
    return rep;
}

}  // namespace trdevdiv
