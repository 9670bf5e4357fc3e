#include "trdevdiv/elasticity.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>

namespace trdevdiv {

namespace {

constexpr double kGauss = 0.57735026918962576451;  // 1/sqrt(3)

// Local node order of one cell, counterclockwise from the lower-left corner,
// in reference coordinates (xi, zeta) in [-1, 1]^2.
constexpr int kOffX[4] = {0, 1, 1, 0};
constexpr int kOffY[4] = {0, 0, 1, 1};
constexpr double kRefX[4] = {-1.0, 1.0, 1.0, -1.0};
constexpr double kRefY[4] = {-1.0, -1.0, 1.0, 1.0};

long node_index(int N, int ix, int iy) { return static_cast<long>(ix) * (N + 1) + iy; }

struct Assembly {
    Eigen::SparseMatrix<double> Keps;  // 2(N+1)^2, strain energy form ||eps||^2
    Eigen::SparseMatrix<double> Kdiv;  // 2(N+1)^2, ||div||^2
    Eigen::SparseMatrix<double> Ms;    // (N+1)^2 scalar consistent mass
};

Assembly build_assembly(const GridSpec& grid) {
    const int N = grid.resolution;
    const double h = grid.spacing();
    const long nn = static_cast<long>(N + 1) * (N + 1);

    Eigen::Matrix<double, 8, 8> Keps_e = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 8> Kdiv_e = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 4, 4> M_e = Eigen::Matrix<double, 4, 4>::Zero();
    const double wq = 0.25 * h * h;
    for (int gx = 0; gx < 2; ++gx)
        for (int gy = 0; gy < 2; ++gy) {
            const double xi = (gx == 0 ? -kGauss : kGauss);
            const double ze = (gy == 0 ? -kGauss : kGauss);
            Eigen::Matrix<double, 4, 1> shp, dx, dy;
            for (int k = 0; k < 4; ++k) {
                shp[k] = 0.25 * (1.0 + kRefX[k] * xi) * (1.0 + kRefY[k] * ze);
                dx[k] = 0.25 * kRefX[k] * (1.0 + kRefY[k] * ze) * (2.0 / h);
                dy[k] = 0.25 * kRefY[k] * (1.0 + kRefX[k] * xi) * (2.0 / h);
            }
            Eigen::Matrix<double, 3, 8> B = Eigen::Matrix<double, 3, 8>::Zero();
            Eigen::Matrix<double, 1, 8> bd = Eigen::Matrix<double, 1, 8>::Zero();
            const double isq2 = 1.0 / std::sqrt(2.0);
            for (int k = 0; k < 4; ++k) {
                B(0, 2 * k) = dx[k];
                B(1, 2 * k + 1) = dy[k];
                B(2, 2 * k) = isq2 * dy[k];
                B(2, 2 * k + 1) = isq2 * dx[k];
                bd(0, 2 * k) = dx[k];
                bd(0, 2 * k + 1) = dy[k];
            }
            Keps_e += wq * B.transpose() * B;
            Kdiv_e += wq * bd.transpose() * bd;
            M_e += wq * shp * shp.transpose();
        }

    std::vector<Eigen::Triplet<double>> teps, tdiv, tm;
    teps.reserve(static_cast<size_t>(N) * N * 64);
    tdiv.reserve(static_cast<size_t>(N) * N * 64);
    tm.reserve(static_cast<size_t>(N) * N * 16);
    for (int cx = 0; cx < N; ++cx)
        for (int cy = 0; cy < N; ++cy) {
            long nodes[4];
            for (int k = 0; k < 4; ++k) nodes[k] = node_index(N, cx + kOffX[k], cy + kOffY[k]);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    tm.emplace_back(nodes[a], nodes[b], M_e(a, b));
                    for (int ca = 0; ca < 2; ++ca)
                        for (int cb = 0; cb < 2; ++cb) {
                            const long ga = 2 * nodes[a] + ca;
                            const long gb = 2 * nodes[b] + cb;
                            teps.emplace_back(ga, gb, Keps_e(2 * a + ca, 2 * b + cb));
                            tdiv.emplace_back(ga, gb, Kdiv_e(2 * a + ca, 2 * b + cb));
                        }
                }
        }

    Assembly out;
    out.Keps.resize(2 * nn, 2 * nn);
    out.Kdiv.resize(2 * nn, 2 * nn);
    out.Ms.resize(nn, nn);
    out.Keps.setFromTriplets(teps.begin(), teps.end());
    out.Kdiv.setFromTriplets(tdiv.begin(), tdiv.end());
    out.Ms.setFromTriplets(tm.begin(), tm.end());
    return out;
}

// Free (interior-node) dof list in the interior vector-field order the
// solution is returned in: interior flat index slowest, component fastest.
std::vector<long> free_dofs(int N) {
    std::vector<long> out;
    out.reserve(static_cast<size_t>(N - 1) * (N - 1) * 2);
    for (int ix = 1; ix < N; ++ix)
        for (int iy = 1; iy < N; ++iy)
            for (int c = 0; c < 2; ++c) out.push_back(2 * node_index(N, ix, iy) + c);
    return out;
}

Eigen::SparseMatrix<double> submatrix(const Eigen::SparseMatrix<double>& A,
                                      const std::vector<long>& idx) {
    std::vector<long> pos(static_cast<size_t>(A.rows()), -1);
    for (size_t i = 0; i < idx.size(); ++i) pos[static_cast<size_t>(idx[i])] = static_cast<long>(i);
    std::vector<Eigen::Triplet<double>> trip;
    for (long col = 0; col < A.outerSize(); ++col) {
        const long pc = pos[static_cast<size_t>(col)];
        if (pc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            const long pr = pos[static_cast<size_t>(it.row())];
            if (pr >= 0) trip.emplace_back(pr, pc, it.value());
        }
    }
    Eigen::SparseMatrix<double> out(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

}  // namespace

ElasticityProblem::ElasticityProblem(const GridSpec& g, double lambda_, double mu_, VectorField f)
    : grid(g), lambda(lambda_), mu(mu_), body_force(std::move(f)) {
    if (grid.dim != 2) throw ConfigError("elasticity: only the unit square (dim = 2) is supported");
    if (grid.resolution > 64) throw ConfigError("elasticity: resolution is limited to 64");
    if (!(lambda > 0.0)) throw ConfigError("elasticity: lambda must be positive");
    if (!(mu > 0.0)) throw ConfigError("elasticity: mu must be positive");
    if (body_force.dim() != 2) throw ConfigError("elasticity: body force needs two components");
    for (const auto& c : body_force.comps) require_layout(c, node_layout(2), "elasticity body force");
}

ElasticitySolution solve_elasticity(const ElasticityProblem& problem) {
    const int N = problem.grid.resolution;
    const Assembly A = build_assembly(problem.grid);
    const std::vector<long> free = free_dofs(N);
    const long nf = static_cast<long>(free.size());

    Eigen::SparseMatrix<double> Keps_ff = submatrix(A.Keps, free);
    Eigen::SparseMatrix<double> Kdiv_ff = submatrix(A.Kdiv, free);
    Eigen::SparseMatrix<double> K = 2.0 * problem.mu * Keps_ff + problem.lambda * Kdiv_ff;

    const long nn = static_cast<long>(N + 1) * (N + 1);
    Eigen::VectorXd load_all(2 * nn);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd fc = Eigen::Map<const Eigen::VectorXd>(
            problem.body_force.comps[static_cast<size_t>(c)].values.data(), nn);
        Eigen::VectorXd mfc = A.Ms * fc;
        for (long i = 0; i < nn; ++i) load_all[2 * i + c] = mfc[i];
    }
    Eigen::VectorXd b(nf);
    for (long i = 0; i < nf; ++i) b[i] = load_all[free[static_cast<size_t>(i)]];

    ElasticitySolution sol;
    sol.u = VectorField(problem.grid, interior_layout(2));
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
    if (bnorm > 0.0) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("elasticity: factorization of the stiffness matrix failed");
        x = ldlt.solve(b);
        sol.diagnostics.iterations = 1;
        double rel = (b - K * x).norm() / bnorm;
        for (int pass = 0; pass < 3 && rel > 1e-10; ++pass) {
            x += ldlt.solve(b - K * x);
            ++sol.diagnostics.iterations;
            rel = (b - K * x).norm() / bnorm;
        }
        sol.diagnostics.residual = rel;
        if (!(rel <= 1e-10))
            throw SolverError("elasticity: relative residual " + std::to_string(rel) +
                              " exceeds 1e-10 after refinement");
    }

    const long mI = static_cast<long>(N - 1) * (N - 1);
    for (int c = 0; c < 2; ++c)
        for (long i = 0; i < mI; ++i)
            sol.u.comps[static_cast<size_t>(c)].values[static_cast<size_t>(i)] = x[2 * i + c];

    sol.energy_elastic = 2.0 * problem.mu * x.dot(Keps_ff * x);
    sol.energy_volumetric = problem.lambda * x.dot(Kdiv_ff * x);
    sol.load_work = b.dot(x);
    sol.energy_residual = std::abs(sol.energy_elastic + sol.energy_volumetric - sol.load_work) /
                          std::max(std::abs(sol.load_work), 1e-300);
    if (bnorm == 0.0) sol.energy_residual = 0.0;
    return sol;
}

TensorField strain(const SpectralScale& scale, const VectorField& u) {
    const GridSpec& grid = scale.grid();
    if (grid.dim != 2 || u.dim() != 2) throw ConfigError("strain: expects dim = 2 fields");
    TensorField grad = gradient_rowwise(scale, u);
    TensorField eps(grid, full_layout(2), 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            ScalarField gij = avg_staggered_to_cell(scale, grad.at(i, j), j);
            ScalarField gji = avg_staggered_to_cell(scale, grad.at(j, i), i);
            ScalarField& e = eps.at(i, j);
            for (size_t p = 0; p < e.values.size(); ++p)
                e.values[p] = 0.5 * (gij.values[p] + gji.values[p]);
        }
    eps.symmetric = true;
    return eps;
}

ScalarField div_at_centers(const GridSpec& grid, const VectorField& u) {
    if (grid.dim != 2 || u.dim() != 2) throw ConfigError("div_at_centers: expects dim = 2 fields");
    for (const auto& c : u.comps) require_layout(c, interior_layout(2), "div_at_centers");
    const int N = grid.resolution;
    const double h = grid.spacing();
    // Zero-extended nodal values: interior node (ix, iy) with 1 <= ix, iy <= N-1.
    auto at = [&](const ScalarField& f, int ix, int iy) -> double {
        if (ix < 1 || ix > N - 1 || iy < 1 || iy > N - 1) return 0.0;
        return f.values[static_cast<size_t>((ix - 1) * (N - 1) + (iy - 1))];
    };
    ScalarField out(grid, full_layout(2));
    const ScalarField& ux = u.comps[0];
    const ScalarField& uy = u.comps[1];
    for (int cx = 0; cx < N; ++cx)
        for (int cy = 0; cy < N; ++cy) {
            const double ddx = (at(ux, cx + 1, cy) + at(ux, cx + 1, cy + 1) - at(ux, cx, cy) -
                                at(ux, cx, cy + 1)) /
                               (2.0 * h);
            const double ddy = (at(uy, cx, cy + 1) + at(uy, cx + 1, cy + 1) - at(uy, cx, cy) -
                                at(uy, cx + 1, cy)) /
                               (2.0 * h);
            out.values[static_cast<size_t>(cx * N + cy)] = ddx + ddy;
        }
    return out;
}

std::vector<LambdaSweepRow> lambda_sweep(const GridSpec& grid, double mu,
                                         const VectorField& body_force,
                                         const std::vector<double>& lambdas,
                                         const std::vector<double>& s_values) {
    if (lambdas.empty()) throw ConfigError("lambda_sweep: no lambda values");
    for (size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw ConfigError("lambda_sweep: lambdas must be positive");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
            throw ConfigError("lambda_sweep: lambdas must be sorted ascending");
    }
    for (double s : s_values) check_sobolev_order(s);
    SpectralScale scale(grid);

    std::vector<LambdaSweepRow> rows;
    rows.reserve(lambdas.size() * s_values.size());
    for (double lambda : lambdas) {
        try {
            ElasticityProblem problem(grid, lambda, mu, body_force);
            ElasticitySolution sol = solve_elasticity(problem);
            ScalarField div = div_at_centers(grid, sol.u);

            double l2 = 0.0;
            {
                // Exact quadrature L2 norm of the bilinear divergence.
                const int N = grid.resolution;
                const double h = grid.spacing();
                auto at = [&](const ScalarField& f, int ix, int iy) -> double {
                    if (ix < 1 || ix > N - 1 || iy < 1 || iy > N - 1) return 0.0;
                    return f.values[static_cast<size_t>((ix - 1) * (N - 1) + (iy - 1))];
                };
                const double wq = 0.25 * h * h;
                for (int cx = 0; cx < N; ++cx)
                    for (int cy = 0; cy < N; ++cy)
                        for (int gx = 0; gx < 2; ++gx)
                            for (int gy = 0; gy < 2; ++gy) {
                                const double xi = (gx == 0 ? -kGauss : kGauss);
                                const double ze = (gy == 0 ? -kGauss : kGauss);
                                double dsum = 0.0;
                                for (int k = 0; k < 4; ++k) {
                                    const double dx =
                                        0.25 * kRefX[k] * (1.0 + kRefY[k] * ze) * (2.0 / h);
                                    const double dy =
                                        0.25 * kRefY[k] * (1.0 + kRefX[k] * xi) * (2.0 / h);
                                    dsum += dx * at(sol.u.comps[0], cx + kOffX[k], cy + kOffY[k]);
                                    dsum += dy * at(sol.u.comps[1], cx + kOffX[k], cy + kOffY[k]);
                                }
                                l2 += wq * dsum * dsum;
                            }
                l2 = std::sqrt(l2);
            }

            for (double s : s_values) {
                LambdaSweepRow row;
                row.lambda = lambda;
                row.s = s;
                row.value = lambda * scale.norm_hs(div, s);
                row.energy = sol.load_work;
                row.iterations = sol.diagnostics.iterations;
                row.l2_div = l2;
                rows.push_back(row);
            }
        } catch (const SolverError& e) {
            for (double s : s_values) {
                LambdaSweepRow row;
                row.lambda = lambda;
                row.s = s;
                row.failed = true;
                row.error = e.what();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

VectorField default_body_force(const GridSpec& grid) {
    if (grid.dim != 2) throw ConfigError("default_body_force: expects dim = 2");
    const int N = grid.resolution;
    const double h = grid.spacing();
    VectorField f(grid, node_layout(2));
    const double pi = 3.14159265358979323846;
    for (int ix = 0; ix <= N; ++ix)
        for (int iy = 0; iy <= N; ++iy) {
            const double x = ix * h;
            const double y = iy * h;
            const size_t p = static_cast<size_t>(node_index(N, ix, iy));
            f.comps[0].values[p] =
                std::sin(2.0 * pi * x) * std::sin(pi * y) + 0.5 * std::cos(pi * x) * y * (1.0 - y);
            f.comps[1].values[p] = std::sin(pi * x) * std::sin(2.0 * pi * y) - 0.3 * x * (1.0 - x);
        }
    return f;
}

VectorField manufactured_force(const ElasticityProblem& problem, const VectorField& u_star) {
    const int N = problem.grid.resolution;
    for (const auto& c : u_star.comps) require_layout(c, interior_layout(2), "manufactured_force");
    if (u_star.dim() != 2) throw ConfigError("manufactured_force: expects two components");

    const Assembly A = build_assembly(problem.grid);
    const long nn = static_cast<long>(N + 1) * (N + 1);
    Eigen::VectorXd u_ext = Eigen::VectorXd::Zero(2 * nn);
    for (int ix = 1; ix < N; ++ix)
        for (int iy = 1; iy < N; ++iy)
            for (int c = 0; c < 2; ++c)
                u_ext[2 * node_index(N, ix, iy) + c] =
                    u_star.comps[static_cast<size_t>(c)]
                        .values[static_cast<size_t>((ix - 1) * (N - 1) + (iy - 1))];

    const Eigen::SparseMatrix<double> K =
        2.0 * problem.mu * A.Keps + problem.lambda * A.Kdiv;
    const Eigen::VectorXd g = K * u_ext;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> mass(A.Ms);
    if (mass.info() != Eigen::Success)
        throw SolverError("manufactured_force: mass factorization failed");
    VectorField f(problem.grid, node_layout(2));
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd gc(nn);
        for (long i = 0; i < nn; ++i) gc[i] = g[2 * i + c];
        Eigen::VectorXd fc = mass.solve(gc);
        for (long i = 0; i < nn; ++i)
            f.comps[static_cast<size_t>(c)].values[static_cast<size_t>(i)] = fc[i];
    }
    return f;
}

VectorField divergence_free_witness(const GridSpec& grid, std::mt19937_64& rng) {
    if (grid.dim != 2) throw ConfigError("divergence_free_witness: expects dim = 2");
    if (grid.resolution > 24)
        throw ConfigError("divergence_free_witness: resolution is limited to 24");
    const int N = grid.resolution;
    const double h = grid.spacing();
    const long mI = static_cast<long>(N - 1) * (N - 1);
    const long nc = static_cast<long>(N) * N;

    // Center-sampled divergence as a dense matrix over interior dofs
    // (component-blocked columns: x block then y block).
    Eigen::MatrixXd Dc = Eigen::MatrixXd::Zero(nc, 2 * mI);
    auto col_of = [&](int comp, int ix, int iy) -> long {
        if (ix < 1 || ix > N - 1 || iy < 1 || iy > N - 1) return -1;
        return static_cast<long>(comp) * mI + static_cast<long>(ix - 1) * (N - 1) + (iy - 1);
    };
    for (int cx = 0; cx < N; ++cx)
        for (int cy = 0; cy < N; ++cy) {
            const long row = static_cast<long>(cx) * N + cy;
            const double w = 1.0 / (2.0 * h);
            const struct { int comp, ix, iy; double sgn; } stencil[8] = {
                {0, cx + 1, cy, +1.0},     {0, cx + 1, cy + 1, +1.0},
                {0, cx, cy, -1.0},         {0, cx, cy + 1, -1.0},
                {1, cx, cy + 1, +1.0},     {1, cx + 1, cy + 1, +1.0},
                {1, cx, cy, -1.0},         {1, cx + 1, cy, -1.0},
            };
            for (const auto& e : stencil) {
                const long col = col_of(e.comp, e.ix, e.iy);
                if (col >= 0) Dc(row, col) += e.sgn * w;
            }
        }

    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd u(2 * mI);
    for (long i = 0; i < u.size(); ++i) u[i] = dist(rng);

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(Dc);
    const Eigen::VectorXd residual_div = Dc * u;
    u -= cod.solve(residual_div);

    const double check = (Dc * u).lpNorm<Eigen::Infinity>();
    if (!(check <= 1e-10 * std::max(1.0, u.lpNorm<Eigen::Infinity>())))
        throw SolverError("divergence_free_witness: kernel projection failed");

    VectorField out(grid, interior_layout(2));
    for (int c = 0; c < 2; ++c)
        for (long i = 0; i < mI; ++i)
            out.comps[static_cast<size_t>(c)].values[static_cast<size_t>(i)] =
                u[static_cast<long>(c) * mI + i];
    return out;
}

}  // namespace trdevdiv
