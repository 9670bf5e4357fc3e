#include <doctest.h>

#include <cmath>
#include <random>

#include "trdevdiv/elasticity.hpp"
#include "trdevdiv/errors.hpp"

using namespace trdevdiv;

namespace {

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

double max_abs(const VectorField& v) {
    double m = 0.0;
    for (const auto& c : v.comps) m = std::max(m, max_abs(c));
    return m;
}

}  // namespace

TEST_CASE("problem validation") {
    const GridSpec grid = build_grid(2, 8);
    const VectorField f(grid, node_layout(2));

    CHECK_THROWS_AS(ElasticityProblem(build_grid(3, 8), 1.0, 1.0, VectorField(build_grid(3, 8), node_layout(3))),
                    ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(build_grid(2, 72), 1.0, 1.0, VectorField(build_grid(2, 72), node_layout(2))),
                    ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(grid, -1.0, 1.0, f), ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(grid, 0.0, 1.0, f), ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(grid, 1.0, -0.5, f), ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(grid, 1.0, 0.0, f), ConfigError);
    CHECK_THROWS_AS(ElasticityProblem(grid, 1.0, 1.0, VectorField(grid, interior_layout(2))),
                    ConfigError);

    VectorField one_comp;
    one_comp.comps.push_back(constant_field(grid, node_layout(2), 1.0));
    CHECK_THROWS_AS(ElasticityProblem(grid, 1.0, 1.0, one_comp), ConfigError);
}

TEST_CASE("zero load gives the zero displacement") {
    const GridSpec grid = build_grid(2, 8);
    const ElasticityProblem problem(grid, 10.0, 0.25, VectorField(grid, node_layout(2)));
    const ElasticitySolution sol = solve_elasticity(problem);
    CHECK(max_abs(sol.u) == 0.0);
    CHECK(sol.energy_elastic == 0.0);
    CHECK(sol.energy_volumetric == 0.0);
    CHECK(sol.load_work == 0.0);
    CHECK(sol.energy_residual == 0.0);
}

TEST_CASE("manufactured displacement is reproduced exactly") {
    const GridSpec grid = build_grid(2, 8);
    std::mt19937_64 rng(51);
    const VectorField u_star = random_vector(grid, interior_layout(2), rng);

    ElasticityProblem seed_problem(grid, 100.0, 0.25, VectorField(grid, node_layout(2)));
    const VectorField f = manufactured_force(seed_problem, u_star);
    const ElasticityProblem problem(grid, 100.0, 0.25, f);
    const ElasticitySolution sol = solve_elasticity(problem);

    double err = 0.0;
    for (int c = 0; c < 2; ++c)
        for (long k = 0; k < sol.u.comps[c].size(); ++k)
            err = std::max(err, std::abs(sol.u.comps[c].values[k] - u_star.comps[c].values[k]));
    CHECK(err <= 1e-10 * std::max(1.0, max_abs(u_star)));
}

TEST_CASE("energy identity holds for the default load") {
    const GridSpec grid = build_grid(2, 16);
    const ElasticityProblem problem(grid, 100.0, 0.25, default_body_force(grid));
    const ElasticitySolution sol = solve_elasticity(problem);

    CHECK(max_abs(sol.u) > 0.0);
    CHECK(sol.load_work > 0.0);
    CHECK(sol.energy_elastic > 0.0);
    CHECK(sol.energy_volumetric > 0.0);
    CHECK(sol.energy_residual < 1e-10);
    CHECK(sol.load_work ==
          doctest::Approx(sol.energy_elastic + sol.energy_volumetric).epsilon(1e-10));
}

TEST_CASE("default body force matches its closed form") {
    const GridSpec grid = build_grid(2, 8);
    const VectorField f = default_body_force(grid);
    const int N = grid.resolution;
    REQUIRE(f.dim() == 2);
    REQUIRE(f.comps[0].layout == node_layout(2));

    const int ix = 3, iy = 5;
    const double x = ix * grid.spacing();
    const double y = iy * grid.spacing();
    const double fx = std::sin(2.0 * M_PI * x) * std::sin(M_PI * y) +
                      0.5 * std::cos(M_PI * x) * y * (1.0 - y);
    const double fy = std::sin(M_PI * x) * std::sin(2.0 * M_PI * y) -
                      0.3 * x * (1.0 - x);
    const long idx = static_cast<long>(ix) * (N + 1) + iy;
    CHECK(f.comps[0].values[idx] == doctest::Approx(fx).epsilon(1e-14));
    CHECK(f.comps[1].values[idx] == doctest::Approx(fy).epsilon(1e-14));
}

TEST_CASE("lambda sweep validation") {
    const GridSpec grid = build_grid(2, 8);
    const VectorField f = default_body_force(grid);
    CHECK_THROWS_AS(lambda_sweep(grid, 0.25, f, {}, {0.5}), ConfigError);
    CHECK_THROWS_AS(lambda_sweep(grid, 0.25, f, {-1.0, 1.0}, {0.5}), ConfigError);
    CHECK_THROWS_AS(lambda_sweep(grid, 0.25, f, {10.0, 1.0}, {0.5}), ConfigError);
    CHECK_THROWS_AS(lambda_sweep(grid, 0.25, f, {1.0}, {1.5}), ConfigError);
}

TEST_CASE("the weighted divergence norm stays flat in lambda") {
    const GridSpec grid = build_grid(2, 16);
    const VectorField f = default_body_force(grid);
    const std::vector<double> lambdas = {1.0, 1e2, 1e4, 1e6};
    const std::vector<double> s_values = {0.0, 0.5, 1.0};
    const auto rows = lambda_sweep(grid, 0.25, f, lambdas, s_values);
    REQUIRE(rows.size() == lambdas.size() * s_values.size());

    for (double s : s_values) {
        double lo = 1e300, hi = 0.0;
        for (const auto& row : rows)
            if (row.s == s) {
                REQUIRE_FALSE(row.failed);
                CHECK(row.value > 0.0);
                lo = std::min(lo, row.value);
                hi = std::max(hi, row.value);
            }
        CHECK(hi / lo <= 2.0);
    }

    double prev = 1e300;
    for (const auto& row : rows)
        if (row.s == 0.0) {
            CHECK(row.l2_div < prev);
            prev = row.l2_div;
        }
}

TEST_CASE("strain is symmetric and its trace is the center divergence") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    std::mt19937_64 rng(52);
    const VectorField u = random_vector(grid, interior_layout(2), rng);

    const TensorField eps = strain(scale, u);
    for (long k = 0; k < eps.at(0, 1).size(); ++k)
        CHECK(eps.at(0, 1).values[k] == eps.at(1, 0).values[k]);

    const ScalarField tr = trace_field(eps);
    const ScalarField dv = div_at_centers(grid, u);
    double err = 0.0;
    for (long k = 0; k < tr.size(); ++k) err = std::max(err, std::abs(tr.values[k] - dv.values[k]));
    CHECK(err < 1e-10 * std::max(1.0, max_abs(dv)));
}

TEST_CASE("divergence-free witness construction") {
    const GridSpec grid = build_grid(2, 8);
    std::mt19937_64 rng(53);
    const VectorField u = divergence_free_witness(grid, rng);
    CHECK(max_abs(u) > 0.0);
    CHECK(max_abs(div_at_centers(grid, u)) <= 1e-10 * std::max(1.0, max_abs(u)));

    std::mt19937_64 rng2(54);
    CHECK_THROWS_AS(divergence_free_witness(build_grid(2, 25), rng2), ConfigError);
}
