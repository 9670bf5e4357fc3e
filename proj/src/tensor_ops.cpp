#include "trdevdiv/tensor_ops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace trdevdiv {

namespace {

void require_uniform_cells(const TensorField& tau, const char* where) {
    if (tau.n <= 0 || tau.entries.empty()) throw ConfigError(std::string(where) + ": empty tensor");
    const Layout cells = full_layout(tau.entries.front().grid.dim);
    for (const auto& e : tau.entries) require_layout(e, cells, where);
}

// Kronecker product with row-major multi-index convention (first factor is
// the slowest axis).
Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (long i = 0; i < A.rows(); ++i)
        for (long j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

}  // namespace

ScalarField trace_field(const TensorField& tau) {
    if (tau.n <= 0 || tau.entries.empty()) throw ConfigError("trace_field: empty tensor");
    ScalarField out = tau.at(0, 0);
    for (int i = 1; i < tau.n; ++i) out += tau.at(i, i);
    return out;
}

TensorField dev_field(const TensorField& tau) {
    ScalarField tr = trace_field(tau);
    TensorField out = tau;
    const double inv_n = 1.0 / tau.n;
    for (int i = 0; i < tau.n; ++i) {
        ScalarField& d = out.at(i, i);
        for (size_t p = 0; p < d.values.size(); ++p) d.values[p] -= inv_n * tr.values[p];
    }
    return out;
}

TensorField sym_field(const TensorField& tau) {
    TensorField out = tau;
    for (int i = 0; i < tau.n; ++i)
        for (int j = 0; j < tau.n; ++j) {
            require_compatible(tau.at(i, j), tau.at(j, i), "sym_field");
            ScalarField& e = out.at(i, j);
            for (size_t p = 0; p < e.values.size(); ++p)
                e.values[p] = 0.5 * (tau.at(i, j).values[p] + tau.at(j, i).values[p]);
        }
    out.symmetric = true;
    return out;
}

ScalarField grad_tilde_axis(const SpectralScale& scale, const ScalarField& v, int axis) {
    const GridSpec& grid = scale.grid();
    require_layout(v, interior_layout(grid.dim), "grad_tilde_axis");
    ScalarField out(grid, staggered_layout(grid.dim, axis));
    out.values = apply_axis(scale.axis().Df, v.values, v.extents(), axis);
    return out;
}

TensorField gradient_rowwise(const SpectralScale& scale, const VectorField& v) {
    const GridSpec& grid = scale.grid();
    if (v.dim() != grid.dim) throw ConfigError("gradient_rowwise: component count mismatch");
    TensorField out;
    out.n = grid.dim;
    out.entries.reserve(static_cast<size_t>(grid.dim) * static_cast<size_t>(grid.dim));
    for (int i = 0; i < grid.dim; ++i)
        for (int j = 0; j < grid.dim; ++j)
            out.entries.push_back(grad_tilde_axis(scale, v.comps[static_cast<size_t>(i)], j));
    return out;
}

ScalarField avg_to_staggered(const SpectralScale& scale, const ScalarField& g, int j) {
    const GridSpec& grid = scale.grid();
    require_layout(g, full_layout(grid.dim), "avg_to_staggered");
    std::vector<double> work = g.values;
    std::vector<int> ext = g.extents();
    for (int a = 0; a < grid.dim; ++a) {
        if (a == j) continue;
        work = apply_axis(scale.axis().Av, work, ext, a);
        ext[static_cast<size_t>(a)] = grid.resolution - 1;
    }
    ScalarField out(grid, staggered_layout(grid.dim, j));
    out.values = std::move(work);
    return out;
}

ScalarField avg_staggered_to_cell(const SpectralScale& scale, const ScalarField& f, int j) {
    const GridSpec& grid = scale.grid();
    require_layout(f, staggered_layout(grid.dim, j), "avg_staggered_to_cell");
    const Eigen::MatrixXd AvT = scale.axis().Av.transpose();
    std::vector<double> work = f.values;
    std::vector<int> ext = f.extents();
    for (int a = 0; a < grid.dim; ++a) {
        if (a == j) continue;
        work = apply_axis(AvT, work, ext, a);
        ext[static_cast<size_t>(a)] = grid.resolution;
    }
    ScalarField out(grid, full_layout(grid.dim));
    out.values = std::move(work);
    return out;
}

ScalarField grad_cell_axis(const SpectralScale& scale, const ScalarField& g, int axis) {
    const GridSpec& grid = scale.grid();
    require_layout(g, full_layout(grid.dim), "grad_cell_axis");
    Layout lay = full_layout(grid.dim);
    lay[static_cast<size_t>(axis)] = AxisKind::Interior;
    ScalarField out(grid, lay);
    out.values = apply_axis(scale.axis().Db, g.values, g.extents(), axis);
    return out;
}

VectorField divergence_rowwise(const SpectralScale& scale, const TensorField& tau) {
    require_uniform_cells(tau, "divergence_rowwise");
    const GridSpec& grid = scale.grid();
    if (tau.n != grid.dim) throw ConfigError("divergence_rowwise: tensor size mismatch");
    VectorField dens(grid, interior_layout(grid.dim));
    for (int i = 0; i < grid.dim; ++i) {
        ScalarField acc(grid, interior_layout(grid.dim));
        for (int j = 0; j < grid.dim; ++j) {
            ScalarField staggered = avg_to_staggered(scale, tau.at(i, j), j);
            ScalarField part(grid, interior_layout(grid.dim));
            part.values = apply_axis(scale.axis().Db, staggered.values, staggered.extents(), j);
            acc += part;
        }
        dens.comps[static_cast<size_t>(i)] = std::move(acc);
    }
    return dens;
}

VectorField div_load_of_scalar(const SpectralScale& scale, const ScalarField& g) {
    const GridSpec& grid = scale.grid();
    require_layout(g, full_layout(grid.dim), "div_load_of_scalar");
    VectorField dens(grid, interior_layout(grid.dim));
    for (int i = 0; i < grid.dim; ++i) {
        ScalarField staggered = avg_to_staggered(scale, g, i);
        ScalarField part(grid, interior_layout(grid.dim));
        part.values = apply_axis(scale.axis().Db, staggered.values, staggered.extents(), i);
        dens.comps[static_cast<size_t>(i)] = std::move(part);
    }
    return dens;
}

double pair_grad(const SpectralScale& scale, const TensorField& tau, const VectorField& v) {
    require_uniform_cells(tau, "pair_grad");
    const GridSpec& grid = scale.grid();
    if (tau.n != grid.dim || v.dim() != grid.dim)
        throw ConfigError("pair_grad: size mismatch");
    double acc = 0.0;
    for (int i = 0; i < grid.dim; ++i)
        for (int j = 0; j < grid.dim; ++j) {
            ScalarField lhs = avg_to_staggered(scale, tau.at(i, j), j);
            ScalarField rhs = grad_tilde_axis(scale, v.comps[static_cast<size_t>(i)], j);
            acc += scale.pair(lhs, rhs);
        }
    return acc;
}

double pair_interior(const SpectralScale& scale, const VectorField& dens, const VectorField& v) {
    if (dens.dim() != v.dim()) throw ConfigError("pair_interior: component count mismatch");
    double acc = 0.0;
    for (int i = 0; i < dens.dim(); ++i)
        acc += scale.pair(dens.comps[static_cast<size_t>(i)], v.comps[static_cast<size_t>(i)]);
    return acc;
}

double tensor_norm_hs(const SpectralScale& scale, const TensorField& tau, double s) {
    require_uniform_cells(tau, "tensor_norm_hs");
    double acc = 0.0;
    for (const auto& e : tau.entries) {
        const double ne = scale.norm_hs(e, s);
        acc += ne * ne;
    }
    return std::sqrt(acc);
}

double div_dual_norm(const SpectralScale& scale, const TensorField& tau, double s) {
    check_sobolev_order(s);
    VectorField dens = divergence_rowwise(scale, tau);
    double acc = 0.0;
    for (const auto& d : dens.comps) {
        const double nd = scale.norm_dual(d, s);
        acc += nd * nd;
    }
    return std::sqrt(acc);
}

double operator_norm(const Eigen::MatrixXd& op, const Eigen::MatrixXd& source_norm,
                     const Eigen::MatrixXd& target_norm) {
    if (source_norm.rows() != source_norm.cols() || target_norm.rows() != target_norm.cols())
        throw ConfigError("operator_norm: norm matrices must be square");
    if (op.cols() != source_norm.rows() || op.rows() != target_norm.rows())
        throw ConfigError("operator_norm: operator/norm dimension mismatch");
    Eigen::LLT<Eigen::MatrixXd> Ls(source_norm);
    if (Ls.info() != Eigen::Success)
        throw ConfigError("operator_norm: source norm matrix is not positive definite");
    Eigen::LLT<Eigen::MatrixXd> Lt(target_norm);
    if (Lt.info() != Eigen::Success)
        throw ConfigError("operator_norm: target norm matrix is not positive definite");
    // sup ||op x||_T / ||x||_S = sigma_max(Lt^T op Ls^{-T}).
    Eigen::MatrixXd M = Lt.matrixU() * op;
    Eigen::MatrixXd LsU = Ls.matrixU();
    M = LsU.transpose().triangularView<Eigen::Lower>().solve(M.transpose()).transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    return svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
}

Eigen::MatrixXd axis_load_matrix(const SpectralScale& scale, int axis) {
    const GridSpec& grid = scale.grid();
    if (axis < 0 || axis >= grid.dim) throw ConfigError("axis_load_matrix: axis out of range");
    const AxisOps& ops = scale.axis();
    const double h = grid.spacing();
    // 1-D coefficient matrices: sine coefficients of Db (resp. Av) applied to
    // each cosine basis vector.
    const Eigen::MatrixXd DB1 = h * ops.BS.transpose() * ops.Db * ops.BC;
    const Eigen::MatrixXd TT = h * ops.BS.transpose() * ops.Av * ops.BC;
    Eigen::MatrixXd out = (axis == 0) ? DB1 : TT;
    for (int a = 1; a < grid.dim; ++a) out = kron(out, (a == axis) ? DB1 : TT);
    return out;
}

Eigen::MatrixXd gradient_form_matrix(const SpectralScale& scale) {
    const GridSpec& grid = scale.grid();
    const long mS = grid.interior_count();
    const long mC = grid.full_count();
    const int d = grid.dim;
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(d * mS, d * d * mC);
    for (int j = 0; j < d; ++j) {
        const Eigen::MatrixXd Aj = axis_load_matrix(scale, j);
        for (int i = 0; i < d; ++i)
            F.block(i * mS, (i * d + j) * mC, mS, mC) = Aj;
    }
    return F;
}

double div_operator_norm(const SpectralScale& scale, double s) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    if (grid.resolution > 12)
        throw ConfigError("div_operator_norm: dense operator norms are limited to resolution 12");
    const Eigen::VectorXd& lam = scale.dirichlet_eigenvalues();
    const Eigen::VectorXd& mu = scale.neumann_eigenvalues();
    const long mS = lam.size(), mC = mu.size();
    Eigen::MatrixXd stacked(grid.dim * mS, mC);
    for (int j = 0; j < grid.dim; ++j) {
        Eigen::MatrixXd Bj = axis_load_matrix(scale, j);
        for (long k = 0; k < mS; ++k) Bj.row(k) *= std::pow(1.0 + lam[k], (s - 1.0) / 2.0);
        for (long m = 0; m < mC; ++m) Bj.col(m) *= std::pow(1.0 + mu[m], -s / 2.0);
        stacked.middleRows(j * mS, mS) = Bj;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    return svd.singularValues()[0];
}

double grad_operator_norm(const SpectralScale& scale, double s) {
    check_sobolev_order(s);
    const GridSpec& grid = scale.grid();
    if (grid.resolution > 12)
        throw ConfigError("grad_operator_norm: dense operator norms are limited to resolution 12");
    const Eigen::VectorXd& lam = scale.dirichlet_eigenvalues();
    const Eigen::VectorXd& mu = scale.neumann_eigenvalues();
    const long mS = lam.size(), mC = mu.size();
    Eigen::MatrixXd side(mS, grid.dim * mC);
    for (int j = 0; j < grid.dim; ++j) {
        Eigen::MatrixXd Bj = axis_load_matrix(scale, j);
        for (long k = 0; k < mS; ++k) Bj.row(k) *= std::pow(1.0 + lam[k], (s - 1.0) / 2.0);
        for (long m = 0; m < mC; ++m) Bj.col(m) *= std::pow(1.0 + mu[m], -s / 2.0);
        side.middleCols(j * mC, mC) = Bj;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(side);
    return svd.singularValues()[0];
}

}  // namespace trdevdiv
