#include <doctest.h>

#include <cmath>
#include <random>

#include "trdevdiv/errors.hpp"
#include "trdevdiv/tdd.hpp"

using namespace trdevdiv;

namespace {

double subspace_quotient(const SpectralScale& scale, const TensorField& tau, double s) {
    const double dev = tensor_norm_hs(scale, dev_field(tau), s);
    const double div = div_dual_norm(scale, tau, s);
    const double tr = scale.norm_hs(trace_field(tau), s);
    return std::sqrt(dev * dev + div * div) / tr;
}

TensorField constant_entry_tensor(const GridSpec& grid, int i, int j, double value) {
    TensorField tau(grid, full_layout(grid.dim), grid.dim);
    tau.at(i, j) = constant_field(grid, full_layout(grid.dim), value);
    return tau;
}

}  // namespace

TEST_CASE("extremal constants at N = 16") {
    const GridSpec grid = build_grid(2, 16);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);

    const SubspaceSpec tmz = SubspaceSpec::trace_mean_zero();
    const CtddEstimate c0 = estimate_ctdd(scale, 0.0, tmz, table);
    const CtddEstimate c5 = estimate_ctdd(scale, 0.5, tmz, table);
    const CtddEstimate c1 = estimate_ctdd(scale, 1.0, tmz, table);
    CHECK(c0.c_hat == doctest::Approx(0.033531203624781).epsilon(1e-9));
    CHECK(c5.c_hat == doctest::Approx(0.034236827264208).epsilon(1e-9));
    CHECK(c1.c_hat == doctest::Approx(0.034828018289320).epsilon(1e-9));

    const CtddEstimate sym = estimate_ctdd(scale, 0.5, SubspaceSpec::symmetric_trace_mean_zero(), table);
    CHECK(sym.c_hat == doctest::Approx(0.034414469514705).epsilon(1e-9));
    CHECK(sym.c_hat >= c5.c_hat - 1e-12);

    for (const CtddEstimate* est : {&c0, &c5, &c1, &sym}) {
        CHECK(est->resolution == 16);
        CHECK(est->c_hat > 0.0);
        CHECK(est->residual_id == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
        CHECK(est->beta > 0.0);
        CHECK(est->proof_chain_constant ==
              doctest::Approx(std::pow(2.0, 1.0 + est->s / 2.0) / est->beta).epsilon(1e-10));
        CHECK(est->c_hat >= est->beta / (std::sqrt(2.0) * std::pow(2.0, 1.0 + est->s / 2.0)));
    }
}

TEST_CASE("extremal tensor attains the reported constant") {
    const GridSpec grid = build_grid(2, 16);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    const double s = 0.5;
    const CtddEstimate est = estimate_ctdd(scale, s, SubspaceSpec::trace_mean_zero(), table);

    CHECK(scale.norm_hs(trace_field(est.extremal_tau), s) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(subspace_quotient(scale, est.extremal_tau, s) == doctest::Approx(est.c_hat).epsilon(1e-8));
    CHECK(std::abs(scale.mean(trace_field(est.extremal_tau))) < 1e-10);
}

TEST_CASE("extremal constant is a floor for random subspace samples") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(41);
    const double s = 0.5;

    for (const SubspaceSpec& spec :
         {SubspaceSpec::trace_mean_zero(), SubspaceSpec::symmetric_trace_mean_zero()}) {
        const double c_hat = estimate_ctdd(scale, s, spec, table).c_hat;
        for (int trial = 0; trial < 50; ++trial) {
            const TensorField tau = random_in_subspace(scale, spec, table, rng);
            CHECK(subspace_quotient(scale, tau, s) >= c_hat - 1e-10);
        }
    }
}

TEST_CASE("the minimized quotient is scale invariant") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(42);
    const TensorField tau = random_in_subspace(scale, SubspaceSpec::trace_mean_zero(), table, rng);

    TensorField scaled_tau = tau;
    for (auto& entry : scaled_tau.entries) entry *= 3.7;

    const double q1 = subspace_quotient(scale, tau, 0.5);
    const double q2 = subspace_quotient(scale, scaled_tau, 0.5);
    CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));
}

TEST_CASE("rayleigh forms agree with direct tensor norms") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(43);
    const double s = 0.5;

    for (const SubspaceSpec& spec :
         {SubspaceSpec::trace_mean_zero(), SubspaceSpec::symmetric_trace_mean_zero()}) {
        const QuadraticFormPair forms = assemble_rayleigh_forms(scale, s, spec, table);
        REQUIRE(forms.numerator.rows() == forms.numerator.cols());
        REQUIRE(forms.denominator.rows() == forms.numerator.rows());

        std::normal_distribution<double> dist(0.0, 1.0);
        Eigen::VectorXd coords(forms.numerator.rows());
        for (long i = 0; i < coords.size(); ++i) coords[i] = dist(rng);

        const TensorField tau = tensor_from_coords(scale, spec, table, coords);
        const double dev = tensor_norm_hs(scale, dev_field(tau), s);
        const double div = div_dual_norm(scale, tau, s);
        const double tr = scale.norm_hs(trace_field(tau), s);

        const double num = coords.dot(forms.numerator * coords);
        const double den = coords.dot(forms.denominator * coords);
        CHECK(num == doctest::Approx(dev * dev + div * div).epsilon(1e-10));
        CHECK(den == doctest::Approx(tr * tr).epsilon(1e-10));
    }
}

TEST_CASE("identity exclusion distances") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const double s = 0.5;

    CHECK(check_id_exclusion(scale, SubspaceSpec::trace_mean_zero(), s) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(check_id_exclusion(scale, SubspaceSpec::symmetric_trace_mean_zero(), s) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    for (double t : {0.0, 0.5, 0.9}) {
        const double n = 2.0;
        const double expected =
            std::sqrt(n - n * n * t * t / ((1.0 - t) * (1.0 - t) + n * t * t));
        CHECK(check_id_exclusion(scale, SubspaceSpec::near_identity(t), s) ==
              doctest::Approx(expected).epsilon(1e-10));
    }

    std::vector<TensorField> off_diag;
    off_diag.push_back(constant_entry_tensor(grid, 0, 1, 1.0));
    CHECK(check_id_exclusion(scale, SubspaceSpec::custom(off_diag), s) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("custom bases that contain the identity or collapse are rejected") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);

    std::vector<TensorField> with_id;
    with_id.push_back(identity_tensor(grid));
    const SubspaceSpec spec_id = SubspaceSpec::custom(with_id);
    CHECK(check_id_exclusion(scale, spec_id, 0.5) < 1e-10);
    CHECK_THROWS_AS(estimate_ctdd(scale, 0.5, spec_id, table), ConfigError);

    std::vector<TensorField> dependent;
    dependent.push_back(constant_entry_tensor(grid, 0, 1, 1.0));
    dependent.push_back(constant_entry_tensor(grid, 0, 1, 1.0));
    CHECK_THROWS_AS(check_id_exclusion(scale, SubspaceSpec::custom(dependent), 0.5), ConfigError);
}

TEST_CASE("custom basis estimates run end to end") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(44);

    std::vector<TensorField> basis;
    basis.push_back(random_in_subspace(scale, SubspaceSpec::trace_mean_zero(), table, rng));
    basis.push_back(random_in_subspace(scale, SubspaceSpec::trace_mean_zero(), table, rng));
    const SubspaceSpec spec = SubspaceSpec::custom(basis);

    const CtddEstimate est = estimate_ctdd(scale, 0.5, spec, table);
    CHECK(est.c_hat > 0.0);
    CHECK(est.residual_id > 1e-8);
    CHECK(subspace_quotient(scale, est.extremal_tau, 0.5) ==
          doctest::Approx(est.c_hat).epsilon(1e-8));
    for (const TensorField& b : basis)
        CHECK(subspace_quotient(scale, b, 0.5) >= est.c_hat - 1e-10);
}

TEST_CASE("near-identity family interpolates away from the structured space") {
    const GridSpec grid = build_grid(2, 16);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    const double s = 0.5;

    const double base = estimate_ctdd(scale, s, SubspaceSpec::trace_mean_zero(), table).c_hat;
    const CtddEstimate at0 = estimate_ctdd(scale, s, SubspaceSpec::near_identity(0.0), table);
    CHECK(at0.c_hat == doctest::Approx(base).epsilon(1e-12));
    CHECK(at0.residual_id == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const CtddEstimate at5 = estimate_ctdd(scale, s, SubspaceSpec::near_identity(0.5), table);
    const CtddEstimate at9 = estimate_ctdd(scale, s, SubspaceSpec::near_identity(0.9), table);
    CHECK(at5.c_hat == doctest::Approx(0.0197663042237).epsilon(1e-8));
    CHECK(at9.c_hat == doctest::Approx(0.0026815670265).epsilon(1e-8));
    CHECK(at5.residual_id == doctest::Approx(0.816496580928).epsilon(1e-10));
    CHECK(at9.residual_id == doctest::Approx(0.110769755124).epsilon(1e-8));
    CHECK(base > at5.c_hat);
    CHECK(at5.c_hat > at9.c_hat);
    CHECK(at9.c_hat > 0.0);
}

TEST_CASE("near-identity parameter validation") {
    CHECK_THROWS_AS(SubspaceSpec::near_identity(-0.1), ConfigError);
    CHECK_THROWS_AS(SubspaceSpec::near_identity(1.0), ConfigError);
    CHECK_NOTHROW(SubspaceSpec::near_identity(0.0));
    CHECK_NOTHROW(SubspaceSpec::near_identity(0.99));
}

TEST_CASE("inequality report on the identity tensor") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const TensorField id = identity_tensor(grid);

    for (double s : {0.0, 0.25, 0.5, 0.75, 1.0})
        for (double C : {1.0, 2.5, 10.0}) {
            const InequalityReport rep = evaluate_inequality(scale, id, s, C);
            CHECK(rep.lhs == 2.0);
            CHECK(rep.rhs_dev == 0.0);
            CHECK(rep.rhs_div == 0.0);
            CHECK(rep.margin == -2.0 / C);
            CHECK_FALSE(rep.satisfied);
        }

    CHECK_THROWS_AS(evaluate_inequality(scale, id, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(evaluate_inequality(scale, id, 0.5, -1.0), ConfigError);
}

TEST_CASE("inequality holds on the structured subspace with the certified constant") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(45);
    const double s = 0.5;
    const double c_hat = estimate_ctdd(scale, s, SubspaceSpec::trace_mean_zero(), table).c_hat;
    const double C = std::sqrt(2.0) / c_hat;

    for (int trial = 0; trial < 50; ++trial) {
        const TensorField tau =
            random_in_subspace(scale, SubspaceSpec::trace_mean_zero(), table, rng);
        const InequalityReport rep = evaluate_inequality(scale, tau, s, C);
        CHECK(rep.margin >= -1e-10);
        CHECK(rep.satisfied);
    }
}

TEST_CASE("proof chain replays exactly on random pairs") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(46);

    for (double s : {0.0, 0.5, 1.0}) {
        const ProofChainReport rep = proof_chain_verify(scale, s, table, rng, 50);
        CHECK(rep.identity_max_err <= 1e-12);
        CHECK(rep.pairing_bound_margin >= -1e-10);
        CHECK(rep.grad_bound_margin >= -1e-10);
        CHECK(rep.conclusion_margin >= -1e-10);
        CHECK(rep.chain_margin >= -1e-10);
        CHECK(rep.dominance);
        CHECK(rep.c_hat > 0.0);
        CHECK(rep.beta > 0.0);
        CHECK(rep.chain_constant ==
              doctest::Approx(std::pow(2.0, 1.0 + s / 2.0) / rep.beta).epsilon(1e-10));
    }
}

TEST_CASE("unsupported sampling and materialization kinds are rejected") {
    const GridSpec grid = build_grid(2, 8);
    const SpectralScale scale(grid);
    const DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(47);

    CHECK_THROWS_AS(random_in_subspace(scale, SubspaceSpec::near_identity(0.5), table, rng),
                    ConfigError);
    std::vector<TensorField> basis;
    basis.push_back(constant_entry_tensor(grid, 0, 1, 1.0));
    CHECK_THROWS_AS(random_in_subspace(scale, SubspaceSpec::custom(basis), table, rng),
                    ConfigError);
    CHECK_THROWS_AS(
        tensor_from_coords(scale, SubspaceSpec::near_identity(0.5), table, Eigen::VectorXd::Ones(4)),
        ConfigError);
}

TEST_CASE("estimate rejects oversized grids") {
    const GridSpec grid = build_grid(2, 36);
    const SpectralScale scale(grid);
    CHECK_THROWS_AS(estimate_ctdd(scale, 0.5, SubspaceSpec::trace_mean_zero()), ConfigError);
}

TEST_CASE("trace-free constant bases are orthonormal and traceless") {
    for (int n : {2, 3}) {
        const auto full = trace_free_basis(n, false);
        const auto sym = trace_free_basis(n, true);
        CHECK(static_cast<int>(full.size()) == n * n - 1);
        CHECK(static_cast<int>(sym.size()) == n * (n + 1) / 2 - 1);
        for (const auto& family : {full, sym})
            for (size_t a = 0; a < family.size(); ++a) {
                CHECK(std::abs(family[a].trace()) < 1e-14);
                for (size_t b = 0; b < family.size(); ++b) {
                    const double ip = (family[a].transpose() * family[b]).trace();
                    CHECK(ip == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-13));
                }
            }
        for (const auto& M : sym) CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("subspace names") {
    CHECK(subspace_name(SubspaceSpec::trace_mean_zero()) == "trace-mean-zero");
    CHECK(subspace_name(SubspaceSpec::symmetric_trace_mean_zero()) == "symmetric-trace-mean-zero");
    CHECK(subspace_name(SubspaceSpec::near_identity(0.5)) == "near-identity(t=0.5)");
    std::vector<TensorField> basis;
    basis.push_back(identity_tensor(build_grid(2, 8)));
    CHECK(subspace_name(SubspaceSpec::custom(basis)) == "custom-basis(1)");
}
