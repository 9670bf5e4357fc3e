#include "trdevdiv/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>

#include "trdevdiv/duality.hpp"
#include "trdevdiv/elasticity.hpp"
#include "trdevdiv/tdd.hpp"

namespace trdevdiv {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

const std::vector<double> kFiveOrders = {0.0, 0.25, 0.5, 0.75, 1.0};

CheckResult run_check(const std::string& name, const std::function<CheckResult()>& body) {
    try {
        CheckResult r = body();
        r.name = name;
        return r;
    } catch (const std::exception& e) {
        return CheckResult{name, false, std::string("exception: ") + e.what()};
    }
}

CheckResult check_duality_identity() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        ScalarField g = random_mean_zero(scale, table, rng);
        for (double s : kFiveOrders)
            worst = std::max(worst, verify_duality_eq5(scale, g, s));
    }
    return {"", worst < 1e-8, "max relative defect " + fmt(worst) + " over 250 cases"};
}

CheckResult check_infsup_sandwich() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(1002);
    double worst_lower = 1e300, worst_upper = 1e300;
    int checks = 0;
    for (double s : kFiveOrders) {
        const double beta = estimate_infsup(scale, s, table).beta;
        const double upper = std::pow(2.0, (1.0 - s) / 2.0);
        for (int i = 0; i < 50; ++i) {
            ScalarField g = random_mean_zero(scale, table, rng);
            const double ds = divsup(scale, g, s);
            const double ng = scale.norm_hs(g, s);
            worst_lower = std::min(worst_lower, ds - beta * ng);
            worst_upper = std::min(worst_upper, upper * ng + 1e-8 - ds);
            ++checks;
        }
    }
    const bool pass = worst_lower >= 0.0 && worst_upper >= 0.0;
    return {"", pass,
            std::to_string(checks) + " checks, min slack lower " + fmt(worst_lower) +
                ", upper " + fmt(worst_upper)};
}

CheckResult check_operator_interpolation() {
    GridSpec grid = build_grid(2, 8);
    SpectralScale scale(grid);
    double g0 = 0.0, g1 = 0.0, d0 = 0.0, d1 = 0.0;
    bool pass = true;
    std::string detail;
    std::vector<double> gs, ds;
    for (double s : kFiveOrders) {
        const double gn = grad_operator_norm(scale, s);
        const double dn = div_operator_norm(scale, s);
        gs.push_back(gn);
        ds.push_back(dn);
        if (gn > std::pow(2.0, s / 2.0) + 0.05) pass = false;
        if (dn > std::pow(2.0, (1.0 - s) / 2.0) + 0.05) pass = false;
    }
    g0 = gs.front();
    g1 = gs.back();
    d0 = ds.front();
    d1 = ds.back();
    double worst_heinz = 0.0;
    for (size_t i = 0; i < kFiveOrders.size(); ++i) {
        const double s = kFiveOrders[i];
        worst_heinz = std::max(worst_heinz,
                               gs[i] - std::pow(g0, 1.0 - s) * std::pow(g1, s));
        worst_heinz = std::max(worst_heinz,
                               ds[i] - std::pow(d0, 1.0 - s) * std::pow(d1, s));
    }
    if (worst_heinz > 1e-10) pass = false;
    detail = "endpoints grad " + fmt(g0) + "/" + fmt(g1) + " div " + fmt(d0) + "/" + fmt(d1) +
             ", log-convexity excess " + fmt(worst_heinz);
    return {"", pass, detail};
}

CheckResult check_extremal_constant() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    SubspaceSpec tmz = SubspaceSpec::trace_mean_zero();
    std::mt19937_64 rng(1004);
    bool pass = true;
    double min_margin = 1e300, min_dominance = 1e300, min_chat = 1e300;
    for (double s : kFiveOrders) {
        CtddEstimate est = estimate_ctdd(scale, s, tmz, table);
        min_chat = std::min(min_chat, est.c_hat);
        if (!(est.c_hat > 0.0)) pass = false;
        const double C = std::sqrt(2.0) / est.c_hat;
        for (int i = 0; i < 100; ++i) {
            TensorField tau = random_in_subspace(scale, tmz, table, rng);
            InequalityReport rep = evaluate_inequality(scale, tau, s, C);
            min_margin = std::min(min_margin, rep.margin);
        }
        const double floor = est.beta / (std::sqrt(2.0) * std::pow(2.0, 1.0 + s / 2.0));
        min_dominance = std::min(min_dominance, est.c_hat - floor);
    }
    if (min_margin < -1e-10 || min_dominance < 0.0) pass = false;
    return {"", pass,
            "min c_hat " + fmt(min_chat) + ", min sample margin " + fmt(min_margin) +
                ", chain dominance slack " + fmt(min_dominance)};
}

CheckResult check_identity_violation() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    TensorField id = identity_tensor(grid);
    bool pass = true;
    double lhs_seen = 0.0;
    for (double s : kFiveOrders)
        for (double C : {1.0, 2.5, 10.0}) {
            InequalityReport rep = evaluate_inequality(scale, id, s, C);
            lhs_seen = rep.lhs;
            if (rep.lhs != 2.0 || rep.rhs_dev != 0.0 || rep.rhs_div != 0.0 || rep.satisfied)
                pass = false;
        }
    return {"", pass,
            "lhs " + fmt(lhs_seen) + " (want exactly 2), rhs exactly zero, satisfied false"};
}

CheckResult check_near_identity_decay() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    const std::vector<double> ts = {0.0, 0.5, 0.9, 0.99};
    std::vector<double> cs;
    for (double t : ts)
        cs.push_back(estimate_ctdd(scale, 0.5, SubspaceSpec::near_identity(t), table).c_hat);
    bool pass = true;
    for (size_t i = 1; i < cs.size(); ++i)
        if (!(cs[i] < cs[i - 1])) pass = false;
    if (!(cs.back() < 0.2 * cs.front())) pass = false;
    std::string detail = "c_hat(t): ";
    for (size_t i = 0; i < cs.size(); ++i)
        detail += (i ? ", " : "") + fmt(ts[i]) + " -> " + fmt(cs[i]);
    return {"", pass, detail};
}

CheckResult check_proof_chain() {
    GridSpec grid = build_grid(2, 16);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(1006);
    bool pass = true;
    double worst_identity = 0.0, worst_margin = 1e300;
    for (double s : {0.0, 0.5, 1.0}) {
        ProofChainReport rep = proof_chain_verify(scale, s, table, rng, 50);
        worst_identity = std::max(worst_identity, rep.identity_max_err);
        worst_margin = std::min({worst_margin, rep.pairing_bound_margin, rep.grad_bound_margin,
                                 rep.conclusion_margin, rep.chain_margin});
        if (!rep.dominance) pass = false;
    }
    if (worst_identity > 1e-12 || worst_margin < -1e-10) pass = false;
    return {"", pass,
            "identity defect " + fmt(worst_identity) + ", min bound margin " + fmt(worst_margin)};
}

CheckResult check_elasticity_robustness() {
    GridSpec grid = build_grid(2, 32);
    VectorField f = default_body_force(grid);
    const std::vector<double> lambdas = {1.0, 1e2, 1e4, 1e6};
    const std::vector<double> orders = {0.0, 0.5, 1.0};
    std::vector<LambdaSweepRow> rows = lambda_sweep(grid, 0.25, f, lambdas, orders);
    bool pass = true;
    double worst_ratio = 0.0;
    for (double s : orders) {
        double vmin = 1e300, vmax = 0.0;
        for (const auto& row : rows) {
            if (row.s != s) continue;
            if (row.failed) pass = false;
            vmin = std::min(vmin, row.value);
            vmax = std::max(vmax, row.value);
        }
        worst_ratio = std::max(worst_ratio, vmax / vmin);
        if (!(vmax / vmin <= 2.0)) pass = false;
    }
    // Energy balance and incompressibility trend at fixed s.
    double worst_energy = 0.0;
    std::vector<double> l2s;
    for (const auto& row : rows)
        if (row.s == 0.0 && !row.failed) l2s.push_back(row.l2_div);
    for (size_t i = 1; i < l2s.size(); ++i)
        if (!(l2s[i] < l2s[i - 1])) pass = false;
    for (double lambda : lambdas) {
        ElasticityProblem problem(grid, lambda, 0.25, f);
        ElasticitySolution sol = solve_elasticity(problem);
        worst_energy = std::max(worst_energy, sol.energy_residual);
    }
    if (worst_energy > 1e-10) pass = false;
    return {"", pass,
            "max flatness ratio " + fmt(worst_ratio) + ", max energy defect " + fmt(worst_energy)};
}

CheckResult check_infsup_refinement() {
    std::vector<double> betas;
    for (int N : {8, 16, 24}) {
        GridSpec grid = build_grid(2, N);
        SpectralScale scale(grid);
        betas.push_back(estimate_infsup(scale, 0.5).beta);
    }
    bool pass = true;
    for (size_t i = 0; i < betas.size(); ++i) {
        if (!(betas[i] > 0.0)) pass = false;
        if (i > 0 && !(betas[i] < betas[i - 1])) pass = false;
    }
    std::string detail = "beta(8,16,24) = " + fmt(betas[0]) + ", " + fmt(betas[1]) + ", " +
                         fmt(betas[2]);
    return {"", pass, detail};
}

CheckResult check_three_d_smoke() {
    GridSpec grid = build_grid(3, 4);
    SpectralScale scale(grid);
    DivLoadTable table = build_div_load_table(scale);
    std::mt19937_64 rng(1009);
    bool pass = true;
    const double beta = estimate_infsup(scale, 0.5, table).beta;
    if (!(beta > 0.0)) pass = false;
    double worst = 0.0;
    for (int i = 0; i < 5; ++i) {
        ScalarField g = random_mean_zero(scale, table, rng);
        for (double s : {0.0, 0.5, 1.0})
            worst = std::max(worst, verify_duality_eq5(scale, g, s));
    }
    if (worst > 1e-8) pass = false;
    InequalityReport rep = evaluate_inequality(scale, identity_tensor(grid), 0.5, 2.0);
    if (rep.lhs != 3.0 || rep.rhs_dev != 0.0 || rep.rhs_div != 0.0 || rep.satisfied) pass = false;
    return {"", pass,
            "beta " + fmt(beta) + ", duality defect " + fmt(worst) + ", id lhs " + fmt(rep.lhs)};
}

}  // namespace

std::vector<CheckResult> run_verification_suite() {
    std::vector<CheckResult> out;
    out.push_back(run_check("duality-identity", check_duality_identity));
    out.push_back(run_check("infsup-sandwich", check_infsup_sandwich));
    out.push_back(run_check("operator-interpolation", check_operator_interpolation));
    out.push_back(run_check("extremal-constant", check_extremal_constant));
    out.push_back(run_check("identity-violation", check_identity_violation));
    out.push_back(run_check("near-identity-decay", check_near_identity_decay));
    out.push_back(run_check("proof-chain", check_proof_chain));
    out.push_back(run_check("elasticity-robustness", check_elasticity_robustness));
    out.push_back(run_check("infsup-refinement", check_infsup_refinement));
    out.push_back(run_check("three-d-smoke", check_three_d_smoke));
    return out;
}

int report_results(const std::vector<CheckResult>& results) {
    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << " -- " << r.detail << "\n";
        if (!r.pass) ++failures;
    }
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures;
}

}  // namespace trdevdiv
