#include <doctest.h>

#include <cmath>
#include <random>

#include "trdevdiv/errors.hpp"
#include "trdevdiv/field.hpp"
#include "trdevdiv/grid.hpp"
#include "trdevdiv/spectral.hpp"
#include "trdevdiv/tensor_ops.hpp"

using namespace trdevdiv;

namespace {

TensorField constant_tensor(const GridSpec& grid, const Eigen::MatrixXd& M) {
    TensorField tau(grid, full_layout(grid.dim), grid.dim);
    for (int i = 0; i < grid.dim; ++i)
        for (int j = 0; j < grid.dim; ++j)
            tau.at(i, j) = constant_field(grid, full_layout(grid.dim), M(i, j));
    return tau;
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

ScalarField scaled(const ScalarField& f, double a) {
    ScalarField out = f;
    out *= a;
    return out;
}

}  // namespace

TEST_CASE("trace and deviatoric pointwise algebra") {
    const GridSpec grid = build_grid(2, 8);

    const TensorField id = identity_tensor(grid);
    const ScalarField tr_id = trace_field(id);
    for (double x : tr_id.values) CHECK(x == 2.0);

    Eigen::MatrixXd M(2, 2);
    M << 2.0, 0.0, 0.0, 0.0;
    const TensorField tau = constant_tensor(grid, M);
    const ScalarField tr = trace_field(tau);
    for (double x : tr.values) CHECK(x == 2.0);

    const TensorField dev = dev_field(tau);
    for (double x : dev.at(0, 0).values) CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
    for (double x : dev.at(1, 1).values) CHECK(x == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(max_abs(dev.at(0, 1)) == 0.0);
    CHECK(max_abs(dev.at(1, 0)) == 0.0);

    const TensorField dev_id = dev_field(id);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(max_abs(dev_id.at(i, j)) < 1e-15);
}

TEST_CASE("deviatoric projection properties on random fields") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(21);
    const TensorField tau = random_tensor(grid, full_layout(2), rng);

    const TensorField dev = dev_field(tau);
    CHECK(max_abs(trace_field(dev)) < 1e-13);

    const TensorField dev2 = dev_field(dev);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double m = 0.0;
            for (long k = 0; k < dev.at(i, j).size(); ++k)
                m = std::max(m, std::abs(dev.at(i, j).values[k] - dev2.at(i, j).values[k]));
            CHECK(m < 1e-13);
        }

    const ScalarField tr = trace_field(tau);
    double frob = 0.0;
    for (int i = 0; i < 2; ++i) {
        const ScalarField spher = scaled(tr, 0.5);
        frob += scale.pair(dev.at(i, i), spher);
    }
    CHECK(std::abs(frob) < 1e-12);

    const TensorField sym = sym_field(tau);
    double asym = 0.0;
    for (long k = 0; k < sym.at(0, 1).size(); ++k)
        asym = std::max(asym, std::abs(sym.at(0, 1).values[k] - sym.at(1, 0).values[k]));
    CHECK(asym < 1e-15);
}

TEST_CASE("row-wise gradient layout, zero field and linearity") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(22);

    VectorField zero_v(grid, interior_layout(2));
    const TensorField gz = gradient_rowwise(scale, zero_v);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(gz.at(i, j).layout == staggered_layout(2, j));
            CHECK(max_abs(gz.at(i, j)) == 0.0);
        }

    const VectorField v = random_vector(grid, interior_layout(2), rng);
    const VectorField w = random_vector(grid, interior_layout(2), rng);
    VectorField lin(grid, interior_layout(2));
    for (int i = 0; i < 2; ++i)
        for (long k = 0; k < lin.comps[i].size(); ++k)
            lin.comps[i].values[k] = 2.0 * v.comps[i].values[k] - 3.0 * w.comps[i].values[k];

    const TensorField gv = gradient_rowwise(scale, v);
    const TensorField gw = gradient_rowwise(scale, w);
    const TensorField gl = gradient_rowwise(scale, lin);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double m = 0.0;
            for (long k = 0; k < gl.at(i, j).size(); ++k)
                m = std::max(m, std::abs(gl.at(i, j).values[k] - 2.0 * gv.at(i, j).values[k] +
                                         3.0 * gw.at(i, j).values[k]));
            CHECK(m < 1e-12);
        }
}

TEST_CASE("single-mode gradient energy matches the eigenvalue") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);

    long kmin = 0;
    scale.dirichlet_eigenvalues().minCoeff(&kmin);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(grid.interior_count());
    c[kmin] = 1.0;
    const ScalarField v = scale.from_sin(c);

    double energy = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
        const ScalarField g = grad_tilde_axis(scale, v, axis);
        energy += scale.pair(g, g);
    }
    CHECK(energy == doctest::Approx(scale.dirichlet_eigenvalues()[kmin]).epsilon(1e-12));
}

TEST_CASE("divergence is the exact negative adjoint of the gradient") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(23);

    for (int trial = 0; trial < 100; ++trial) {
        const TensorField tau = random_tensor(grid, full_layout(2), rng);
        const VectorField v = random_vector(grid, interior_layout(2), rng);
        const double lhs = pair_interior(scale, divergence_rowwise(scale, tau), v);
        const double rhs = -pair_grad(scale, tau, v);
        const double mag = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        CHECK(std::abs(lhs - rhs) / mag < 1e-12);
    }
}

TEST_CASE("constant tensors have vanishing divergence pairing") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(24);
    Eigen::MatrixXd M(2, 2);
    M << 1.25, -0.5, 2.0, 0.75;
    const TensorField tau = constant_tensor(grid, M);
    for (int trial = 0; trial < 10; ++trial) {
        const VectorField v = random_vector(grid, interior_layout(2), rng);
        CHECK(std::abs(pair_interior(scale, divergence_rowwise(scale, tau), v)) < 1e-12);
    }
}

TEST_CASE("scalar-times-identity loads agree with the tensor divergence") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(25);
    const ScalarField phi = random_field(grid, full_layout(2), rng);

    TensorField phi_id = identity_tensor(grid);
    for (int i = 0; i < 2; ++i)
        for (long k = 0; k < phi.size(); ++k) phi_id.at(i, i).values[k] = phi.values[k];

    const VectorField a = div_load_of_scalar(scale, phi);
    const VectorField b = divergence_rowwise(scale, phi_id);
    for (int i = 0; i < 2; ++i) {
        double m = 0.0;
        for (long k = 0; k < a.comps[i].size(); ++k)
            m = std::max(m, std::abs(a.comps[i].values[k] - b.comps[i].values[k]));
        CHECK(m < 1e-13);
    }
}

TEST_CASE("tensor norms aggregate entrywise norms in Frobenius style") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(26);
    const TensorField tau = random_tensor(grid, full_layout(2), rng);
    const double s = 0.4;

    double sum_sq = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double ns = scale.norm_hs(tau.at(i, j), s);
            sum_sq += ns * ns;
        }
    CHECK(tensor_norm_hs(scale, tau, s) == doctest::Approx(std::sqrt(sum_sq)).epsilon(1e-12));

    const VectorField load = divergence_rowwise(scale, tau);
    double dual_sq = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double nd = scale.norm_dual(load.comps[i], s);
        dual_sq += nd * nd;
    }
    CHECK(div_dual_norm(scale, tau, s) == doctest::Approx(std::sqrt(dual_sq)).epsilon(1e-12));
}

TEST_CASE("generalized operator norm basics") {
    const Eigen::MatrixXd I5 = Eigen::MatrixXd::Identity(5, 5);
    CHECK(operator_norm(I5, I5, I5) == doctest::Approx(1.0).epsilon(1e-12));

    Eigen::MatrixXd op(1, 1), one(1, 1);
    op << 3.0;
    one << 1.0;
    CHECK(operator_norm(op, one, one) == doctest::Approx(3.0).epsilon(1e-12));

    Eigen::MatrixXd indef(1, 1);
    indef << -1.0;
    CHECK_THROWS_AS(operator_norm(op, indef, one), ConfigError);
    CHECK_THROWS_AS(operator_norm(op, one, indef), ConfigError);
    CHECK_THROWS_AS(operator_norm(Eigen::MatrixXd::Identity(2, 3), I5, I5), ConfigError);
}

TEST_CASE("axis load matrix columns match the materialized loads") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const int j = 1;
    const Eigen::MatrixXd Aj = axis_load_matrix(scale, j);
    REQUIRE(Aj.rows() == grid.interior_count());
    REQUIRE(Aj.cols() == grid.full_count());

    const long m = 5;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(grid.full_count());
    c[m] = 1.0;
    TensorField tau(grid, full_layout(2), 2);
    tau.at(0, j) = scale.from_cos(c);
    const VectorField load = divergence_rowwise(scale, tau);
    const Eigen::VectorXd got = scale.to_sin(load.comps[0]);
    CHECK((got - Aj.col(m)).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(axis_load_matrix(scale, 2), ConfigError);
}

TEST_CASE("discrete operator norms respect the dimensional bounds") {
    for (int N : {8, 12}) {
        const GridSpec grid = build_grid(2, N);
        const SpectralScale scale(grid);
        for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            CHECK(grad_operator_norm(scale, s) <= std::pow(2.0, s / 2.0) + 0.05);
            CHECK(div_operator_norm(scale, s) <= std::pow(2.0, (1.0 - s) / 2.0) + 0.05);
        }
    }

    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    CHECK(grad_operator_norm(scale, 0.0) <= std::sqrt(2.0));
    CHECK(div_operator_norm(scale, 1.0) <= std::sqrt(2.0));
}

TEST_CASE("operator norms interpolate log-convexly") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);

    const double g0 = grad_operator_norm(scale, 0.0);
    const double g1 = grad_operator_norm(scale, 1.0);
    const double d0 = div_operator_norm(scale, 0.0);
    const double d1 = div_operator_norm(scale, 1.0);
    for (double s : {0.25, 0.5, 0.75}) {
        CHECK(grad_operator_norm(scale, s) <= std::pow(g0, 1.0 - s) * std::pow(g1, s) + 1e-10);
        CHECK(div_operator_norm(scale, s) <= std::pow(d0, 1.0 - s) * std::pow(d1, s) + 1e-10);
    }
}

TEST_CASE("dense operator norms reject large grids") {
    const GridSpec grid = build_grid(2, 16);
    const SpectralScale scale(grid);
    CHECK_THROWS_AS(grad_operator_norm(scale, 0.5), ConfigError);
    CHECK_THROWS_AS(div_operator_norm(scale, 0.5), ConfigError);
}
