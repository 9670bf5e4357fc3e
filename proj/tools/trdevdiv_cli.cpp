#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#include "trdevdiv/duality.hpp"
#include "trdevdiv/elasticity.hpp"
#include "trdevdiv/io.hpp"
#include "trdevdiv/tdd.hpp"
#include "trdevdiv/verify.hpp"
#include "trdevdiv/version.hpp"

namespace {

using namespace trdevdiv;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::vector<double> dedup_orders(const std::vector<double>& s_values) {
    if (s_values.empty()) throw ConfigError("no s values configured");
    std::vector<double> out;
    std::set<double> seen;
    for (double s : s_values)
        if (seen.insert(s).second) out.push_back(s);
    for (double s : out) check_sobolev_order(s);
    return out;
}

std::vector<int> resolved_resolutions(const RunConfig& config) {
    if (config.resolutions.empty()) throw ConfigError("no resolutions configured");
    return config.resolutions;
}

std::filesystem::path out_path(const RunConfig& config, const std::string& name) {
    return std::filesystem::path(config.out_dir) / name;
}

json json_header(const RunConfig& config) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["config"] = hex64(config.digest());
    j["seed"] = config.seed;
    return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << j.dump(2) << "\n";
}

std::string svg_title(const RunConfig& config, const std::string& base) {
    return base + " [config " + hex64(config.digest()) + " seed " +
           std::to_string(config.seed) + "]";
}

SubspaceSpec subspace_from_config(const RunConfig& config) {
    if (config.subspace == "trace-mean-zero") return SubspaceSpec::trace_mean_zero();
    if (config.subspace == "symmetric-trace-mean-zero")
        return SubspaceSpec::symmetric_trace_mean_zero();
    if (config.subspace == "near-identity") return SubspaceSpec::near_identity(config.near_id_t);
    if (config.subspace == "custom") {
        if (config.basis_file.empty())
            throw ConfigError("subspace 'custom' needs basis_file (--basis)");
        return SubspaceSpec::custom(read_tensor_basis(config.basis_file));
    }
    throw ConfigError("unknown subspace '" + config.subspace +
                      "' (expected trace-mean-zero, symmetric-trace-mean-zero, near-identity, "
                      "custom)");
}

int cmd_norms(const RunConfig& config) {
    const std::vector<double> orders = dedup_orders(config.s_values);
    std::mt19937_64 rng(config.seed);

    ScalarField g, v;
    if (!config.field_file.empty()) {
        ScalarField f = read_scalar_field(config.field_file);
        const GridSpec grid = f.grid;
        SpectralScale scale(grid);
        DivLoadTable table = build_div_load_table(scale);
        if (f.layout == full_layout(grid.dim)) {
            g = std::move(f);
            v = random_field(grid, interior_layout(grid.dim), rng);
        } else if (f.layout == interior_layout(grid.dim)) {
            v = std::move(f);
            g = random_mean_zero(scale, table, rng);
        } else {
            throw ConfigError("norms: field file must be on the full or interior layout");
        }
    } else {
        const GridSpec grid = build_grid(config.dim, resolved_resolutions(config).front());
        SpectralScale scale(grid);
        DivLoadTable table = build_div_load_table(scale);
        g = random_mean_zero(scale, table, rng);
        v = random_field(grid, interior_layout(grid.dim), rng);
    }

    SpectralScale scale(g.grid);
    CsvWriter csv(out_path(config, "norms.csv"), config,
                  {"s", "norm_hs", "norm_hs_tilde", "norm_dual", "norm_dual_cell"});
    for (double s : orders) {
        // Dual column: H^{s-1} norm of the divergence load of g*id,
        // aggregated over the components.
        VectorField load = div_load_of_scalar(scale, g);
        double dual2 = 0.0;
        for (const auto& comp : load.comps) {
            const double nd = scale.norm_dual(comp, s);
            dual2 += nd * nd;
        }
        csv.row_numeric({s, scale.norm_hs(g, s), scale.norm_hs_tilde(v, s), std::sqrt(dual2),
                         scale.norm_dual_cell(g, s)});
    }
    csv.close();
    return kExitOk;
}

int cmd_infsup(const RunConfig& config) {
    const std::vector<double> orders = dedup_orders(config.s_values);
    const std::vector<int> resolutions = resolved_resolutions(config);

    CsvWriter csv(out_path(config, "infsup.csv"), config, {"s", "N", "beta", "inv_beta"});
    json records = json_header(config);
    records["rows"] = json::array();
    int exit_code = kExitOk;

    std::vector<SvgSeries> curves;
    for (int N : resolutions) {
        GridSpec grid = build_grid(config.dim, N);
        SpectralScale scale(grid);
        DivLoadTable table = build_div_load_table(scale);
        SvgSeries series;
        series.label = "beta N=" + std::to_string(N);
        for (double s : orders) {
            double beta = std::numeric_limits<double>::quiet_NaN();
            try {
                beta = estimate_infsup(scale, s, table).beta;
            } catch (const SolverError& e) {
                std::cerr << "solver error at s=" << s << " N=" << N << ": " << e.what() << "\n";
                exit_code = kExitSolver;
            }
            csv.row_numeric({s, static_cast<double>(N), beta, 1.0 / beta});
            records["rows"].push_back({{"s", s}, {"N", N}, {"beta", beta}});
            if (std::isfinite(beta)) {
                series.x.push_back(s);
                series.y.push_back(beta);
            }
        }
        curves.push_back(std::move(series));
    }
    csv.close();
    write_json_file(out_path(config, "infsup.json"), records);
    write_svg_curves(out_path(config, "infsup.svg"), svg_title(config, "inf-sup constant"), "s",
                     "beta", curves);
    return exit_code;
}

int cmd_ctdd(const RunConfig& config) {
    const std::vector<double> orders = dedup_orders(config.s_values);
    const std::vector<int> resolutions = resolved_resolutions(config);
    const SubspaceSpec spec = subspace_from_config(config);
    const bool mean_zero_trace = spec.kind == SubspaceSpec::Kind::TraceMeanZero ||
                                 spec.kind == SubspaceSpec::Kind::SymmetricTraceMeanZero;

    CsvWriter csv(out_path(config, "ctdd.csv"), config,
                  {"s", "N", "subspace", "c_hat", "beta", "proof_chain_constant", "residual_id",
                   "error"});
    json records = json_header(config);
    records["rows"] = json::array();
    int exit_code = kExitOk;

    std::vector<SvgSeries> curves;
    for (int N : resolutions) {
        GridSpec grid = build_grid(config.dim, N);
        SpectralScale scale(grid);
        DivLoadTable table = build_div_load_table(scale);
        SvgSeries chat_series, chain_series;
        chat_series.label = "c_hat N=" + std::to_string(N);
        chain_series.label = "chain C N=" + std::to_string(N);
        for (double s : orders) {
            std::vector<std::string> cells = {CsvWriter::format(s), std::to_string(N),
                                              subspace_name(spec)};
            json row = {{"s", s}, {"N", N}, {"subspace", subspace_name(spec)}};
            try {
                CtddEstimate est = estimate_ctdd(scale, s, spec, table);
                cells.push_back(CsvWriter::format(est.c_hat));
                cells.push_back(CsvWriter::format(est.beta));
                cells.push_back(CsvWriter::format(est.proof_chain_constant));
                cells.push_back(CsvWriter::format(est.residual_id));
                cells.push_back("");
                row["c_hat"] = est.c_hat;
                row["beta"] = est.beta;
                row["proof_chain_constant"] = est.proof_chain_constant;
                row["residual_id"] = est.residual_id;
                chat_series.x.push_back(s);
                chat_series.y.push_back(est.c_hat);
                chain_series.x.push_back(s);
                chain_series.y.push_back(est.proof_chain_constant);

                if (!(est.c_hat > 0.0 && std::isfinite(est.c_hat))) {
                    std::cerr << "invariant failure: c_hat not positive at s=" << s << " N=" << N
                              << "\n";
                    exit_code = std::max(exit_code, kExitInvariant);
                }
                if (mean_zero_trace) {
                    const double floor =
                        est.beta / (std::sqrt(2.0) *
                                    std::pow(static_cast<double>(grid.dim), 1.0 + s / 2.0));
                    if (!(est.c_hat >= floor - 1e-12)) {
                        std::cerr << "invariant failure: chain dominance violated at s=" << s
                                  << " N=" << N << "\n";
                        exit_code = std::max(exit_code, kExitInvariant);
                    }
                }
            } catch (const ConfigError& e) {
                cells.insert(cells.end(), {"nan", "nan", "nan", "nan", e.what()});
                row["error"] = e.what();
                std::cerr << "config error at s=" << s << " N=" << N << ": " << e.what() << "\n";
                exit_code = kExitConfig;
            } catch (const SolverError& e) {
                cells.insert(cells.end(), {"nan", "nan", "nan", "nan", e.what()});
                row["error"] = e.what();
                std::cerr << "solver error at s=" << s << " N=" << N << ": " << e.what() << "\n";
                if (exit_code != kExitConfig) exit_code = kExitSolver;
            }
            csv.row(cells);
            records["rows"].push_back(row);
        }
        curves.push_back(std::move(chat_series));
        curves.push_back(std::move(chain_series));
    }
    csv.close();
    write_json_file(out_path(config, "ctdd.json"), records);
    write_svg_curves(out_path(config, "ctdd.svg"),
                     svg_title(config, "extremal constant and chain constant"), "s", "value",
                     curves);
    return exit_code;
}

int cmd_elasticity(const RunConfig& config) {
    const std::vector<double> orders = dedup_orders(config.s_values);
    const int N = resolved_resolutions(config).front();
    GridSpec grid = build_grid(2, N);
    if (config.lambdas.empty()) throw ConfigError("no lambda values configured");
    if (!(config.mu > 0.0)) throw ConfigError("mu must be positive");

    VectorField f(grid, node_layout(2));
    if (!config.field_file.empty()) {
        // Scalar node-layout profile applied to both force components.
        ScalarField profile = read_scalar_field(config.field_file);
        if (profile.grid.resolution != N || profile.grid.dim != 2 ||
            profile.layout != node_layout(2))
            throw ConfigError("elasticity: field file must be a node-layout scalar on the "
                              "configured grid");
        f.comps[0] = profile;
        f.comps[1] = profile;
    } else {
        f = default_body_force(grid);
    }

    std::vector<LambdaSweepRow> rows = lambda_sweep(grid, config.mu, f, config.lambdas, orders);

    CsvWriter csv(out_path(config, "elasticity.csv"), config,
                  {"lambda", "s", "N", "value", "energy", "iterations", "error"});
    int exit_code = kExitOk;
    std::vector<SvgSeries> curves;
    for (double s : orders) {
        SvgSeries series;
        series.label = "s=" + CsvWriter::format(s);
        for (const auto& row : rows) {
            if (row.s != s) continue;
            if (row.failed) {
                csv.row({CsvWriter::format(row.lambda), CsvWriter::format(s), std::to_string(N),
                         "nan", "nan", "0", row.error});
                std::cerr << "solver error at lambda=" << row.lambda << ": " << row.error << "\n";
                exit_code = kExitSolver;
                continue;
            }
            csv.row({CsvWriter::format(row.lambda), CsvWriter::format(s), std::to_string(N),
                     CsvWriter::format(row.value), CsvWriter::format(row.energy),
                     std::to_string(row.iterations), ""});
            series.x.push_back(row.lambda);
            series.y.push_back(row.value);
        }
        curves.push_back(std::move(series));
    }
    csv.close();
    write_svg_curves(out_path(config, "elasticity.svg"),
                     svg_title(config, "lambda * |div u|_Hs vs lambda"), "lambda", "value", curves,
                     /*log_x=*/true);
    return exit_code;
}

int cmd_verify() {
    std::vector<CheckResult> results = run_verification_suite();
    const int failures = report_results(results);
    return failures == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tr-dev-div inequality: discrete estimators and experiment sweeps"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_file;
    std::string dim_str, subspace_str, near_id_t_str, mu_str, seed_str, out_str, tol_str;
    std::string field_str, basis_str;
    std::vector<std::string> resolution_args, s_args, lambda_args;

    app.add_option("--config", config_file, "key=value configuration file");
    auto* opt_dim = app.add_option("--dim", dim_str, "grid dimension (2 or 3)");
    auto* opt_res =
        app.add_option("--resolution", resolution_args, "cells per axis (repeatable/CSV list)");
    auto* opt_s = app.add_option("--s", s_args, "Sobolev orders in [0,1] (repeatable/CSV list)");
    auto* opt_sub = app.add_option("--subspace", subspace_str,
                                   "trace-mean-zero | symmetric-trace-mean-zero | near-identity | "
                                   "custom");
    auto* opt_t = app.add_option("--near-id-t", near_id_t_str, "near-identity parameter in [0,1)");
    auto* opt_lam =
        app.add_option("--lambda", lambda_args, "Lame lambda values (repeatable/CSV list)");
    auto* opt_mu = app.add_option("--mu", mu_str, "Lame mu (positive)");
    auto* opt_seed = app.add_option("--seed", seed_str, "random seed");
    auto* opt_out = app.add_option("--out", out_str, "output directory");
    auto* opt_tol = app.add_option("--tol", tol_str, "solver tolerance");
    auto* opt_field = app.add_option("--field", field_str, "input field JSON (norms, elasticity)");
    auto* opt_basis = app.add_option("--basis", basis_str, "custom-basis JSON (ctdd)");

    CLI::App* sub_norms = app.add_subcommand("norms", "fractional norms of one field");
    CLI::App* sub_infsup = app.add_subcommand("infsup", "inf-sup constant sweep");
    CLI::App* sub_ctdd = app.add_subcommand("ctdd", "extremal tr-dev-div constant sweep");
    CLI::App* sub_elast = app.add_subcommand("elasticity", "lambda-robustness demo sweep");
    CLI::App* sub_verify = app.add_subcommand("verify", "run the full invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        RunConfig config;
        if (!config_file.empty()) apply_config_file(config, read_config_file(config_file));

        auto join = [](const std::vector<std::string>& items) {
            std::string out;
            for (size_t i = 0; i < items.size(); ++i) {
                if (i) out += ",";
                out += items[i];
            }
            return out;
        };
        std::map<std::string, std::string> overrides;
        if (opt_dim->count()) overrides["dim"] = dim_str;
        if (opt_res->count()) overrides["resolutions"] = join(resolution_args);
        if (opt_s->count()) overrides["s_values"] = join(s_args);
        if (opt_sub->count()) overrides["subspace"] = subspace_str;
        if (opt_t->count()) overrides["near_id_t"] = near_id_t_str;
        if (opt_lam->count()) overrides["lambdas"] = join(lambda_args);
        if (opt_mu->count()) overrides["mu"] = mu_str;
        if (opt_seed->count()) overrides["seed"] = seed_str;
        if (opt_out->count()) overrides["out_dir"] = out_str;
        if (opt_tol->count()) overrides["tol"] = tol_str;
        if (opt_field->count()) overrides["field_file"] = field_str;
        if (opt_basis->count()) overrides["basis_file"] = basis_str;
        apply_config_file(config, overrides);

        if (config.resolutions.empty()) config.resolutions = {8};
        if (config.s_values.empty()) config.s_values = {0.0, 0.5, 1.0};
        if (config.lambdas.empty()) config.lambdas = {1.0, 1e2, 1e4, 1e6};

        if (sub_verify->parsed()) {
            config.experiment = "verify";
            return cmd_verify();
        }
        std::filesystem::create_directories(config.out_dir);
        if (sub_norms->parsed()) {
            config.experiment = "norms";
            return cmd_norms(config);
        }
        if (sub_infsup->parsed()) {
            config.experiment = "infsup";
            return cmd_infsup(config);
        }
        if (sub_ctdd->parsed()) {
            config.experiment = "ctdd";
            return cmd_ctdd(config);
        }
        if (sub_elast->parsed()) {
            config.experiment = "elasticity";
            return cmd_elasticity(config);
        }
        throw ConfigError("no subcommand selected");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
