#include "trdevdiv/spectral.hpp"

#include <cmath>
#include <numbers>

namespace trdevdiv {

namespace {

// Flattened tensor-sum of per-axis eigenvalues over `dim` axes with `n`
// modes per axis, row-major (last axis fastest).
Eigen::VectorXd tensor_sum(const Eigen::VectorXd& axis_vals, int dim) {
    const int n = static_cast<int>(axis_vals.size());
    long total = 1;
    for (int a = 0; a < dim; ++a) total *= n;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(total);
    for (long flat = 0; flat < total; ++flat) {
        long rem = flat;
        double sum = 0.0;
        for (int a = dim - 1; a >= 0; --a) {
            sum += axis_vals[static_cast<int>(rem % n)];
            rem /= n;
        }
        out[flat] = sum;
    }
    return out;
}

}  // namespace

AxisOps build_axis_ops(int N) {
    const double pi = std::numbers::pi;
    const double h = 1.0 / N;
    AxisOps ops;
    ops.N = N;

    ops.BC.resize(N, N);
    for (int c = 0; c < N; ++c)
        for (int k = 0; k < N; ++k) {
            const double eta = (k == 0) ? 1.0 : std::sqrt(2.0);
            ops.BC(c, k) = eta * std::cos(pi * (c + 0.5) * k / N);
        }

    ops.BS.resize(N - 1, N - 1);
    for (int i = 1; i < N; ++i)
        for (int k = 1; k < N; ++k)
            ops.BS(i - 1, k - 1) = std::sqrt(2.0) * std::sin(pi * i * k / N);

    ops.mu.resize(N);
    for (int k = 0; k < N; ++k) {
        const double d = 2.0 / h * std::sin(pi * k / (2.0 * N));
        ops.mu[k] = d * d;
    }
    ops.lam.resize(N - 1);
    for (int k = 1; k < N; ++k) {
        const double d = 2.0 / h * std::sin(pi * k / (2.0 * N));
        ops.lam[k - 1] = d * d;
    }

    ops.Df = Eigen::MatrixXd::Zero(N, N - 1);
    for (int c = 0; c < N; ++c) {
        if (c + 1 <= N - 1) ops.Df(c, c) += 1.0 / h;   // node c+1
        if (c >= 1) ops.Df(c, c - 1) -= 1.0 / h;       // node c
    }
    ops.Db = -ops.Df.transpose();

    ops.Av = Eigen::MatrixXd::Zero(N - 1, N);
    for (int i = 1; i < N; ++i) {
        ops.Av(i - 1, i - 1) = 0.5;
        ops.Av(i - 1, i) = 0.5;
    }
    return ops;
}

std::vector<double> apply_axis(const Eigen::MatrixXd& M, const std::vector<double>& in,
                               const std::vector<int>& extents, int axis) {
    const int dim = static_cast<int>(extents.size());
    if (axis < 0 || axis >= dim) throw ConfigError("apply_axis: axis out of range");
    const int na = extents[static_cast<size_t>(axis)];
    if (M.cols() != na) throw ConfigError("apply_axis: matrix width does not match axis extent");
    const int nb = static_cast<int>(M.rows());

    long inner = 1, outer = 1;
    for (int a = axis + 1; a < dim; ++a) inner *= extents[static_cast<size_t>(a)];
    for (int a = 0; a < axis; ++a) outer *= extents[static_cast<size_t>(a)];
    if (static_cast<long>(in.size()) != outer * na * inner)
        throw ConfigError("apply_axis: input size does not match extents");

    std::vector<double> out(static_cast<size_t>(outer * nb * inner), 0.0);
    Eigen::VectorXd fiber(na), image(nb);
    for (long o = 0; o < outer; ++o)
        for (long i = 0; i < inner; ++i) {
            for (int k = 0; k < na; ++k)
                fiber[k] = in[static_cast<size_t>((o * na + k) * inner + i)];
            image.noalias() = M * fiber;
            for (int r = 0; r < nb; ++r)
                out[static_cast<size_t>((o * nb + r) * inner + i)] = image[r];
        }
    return out;
}

SpectralScale::SpectralScale(const GridSpec& grid) : grid_(grid), ops_(build_axis_ops(grid.resolution)) {
    mu_flat_ = tensor_sum(ops_.mu, grid.dim);
    lam_flat_ = tensor_sum(ops_.lam, grid.dim);
}

Eigen::VectorXd SpectralScale::to_cos(const ScalarField& f) const {
    require_layout(f, full_layout(grid_.dim), "to_cos");
    std::vector<double> work = f.values;
    std::vector<int> ext = f.extents();
    const Eigen::MatrixXd BCt = ops_.BC.transpose();
    for (int a = 0; a < grid_.dim; ++a) work = apply_axis(BCt, work, ext, a);
    double weight = 1.0;
    for (int a = 0; a < grid_.dim; ++a) weight *= grid_.spacing();
    Eigen::VectorXd coeffs(static_cast<long>(work.size()));
    for (size_t i = 0; i < work.size(); ++i) coeffs[static_cast<long>(i)] = weight * work[i];
    return coeffs;
}

ScalarField SpectralScale::from_cos(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != grid_.full_count())
        throw ConfigError("from_cos: coefficient count does not match the cell lattice");
    std::vector<double> work(static_cast<size_t>(coeffs.size()));
    for (long i = 0; i < coeffs.size(); ++i) work[static_cast<size_t>(i)] = coeffs[i];
    std::vector<int> ext = layout_extents(full_layout(grid_.dim), grid_.resolution);
    for (int a = 0; a < grid_.dim; ++a) work = apply_axis(ops_.BC, work, ext, a);
    ScalarField f(grid_, full_layout(grid_.dim));
    f.values = std::move(work);
    return f;
}

Eigen::VectorXd SpectralScale::to_sin(const ScalarField& f) const {
    require_layout(f, interior_layout(grid_.dim), "to_sin");
    std::vector<double> work = f.values;
    std::vector<int> ext = f.extents();
    const Eigen::MatrixXd BSt = ops_.BS.transpose();
    for (int a = 0; a < grid_.dim; ++a) work = apply_axis(BSt, work, ext, a);
    double weight = 1.0;
    for (int a = 0; a < grid_.dim; ++a) weight *= grid_.spacing();
    Eigen::VectorXd coeffs(static_cast<long>(work.size()));
    for (size_t i = 0; i < work.size(); ++i) coeffs[static_cast<long>(i)] = weight * work[i];
    return coeffs;
}

ScalarField SpectralScale::from_sin(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() != grid_.interior_count())
        throw ConfigError("from_sin: coefficient count does not match the interior lattice");
    std::vector<double> work(static_cast<size_t>(coeffs.size()));
    for (long i = 0; i < coeffs.size(); ++i) work[static_cast<size_t>(i)] = coeffs[i];
    std::vector<int> ext = layout_extents(interior_layout(grid_.dim), grid_.resolution);
    for (int a = 0; a < grid_.dim; ++a) work = apply_axis(ops_.BS, work, ext, a);
    ScalarField f(grid_, interior_layout(grid_.dim));
    f.values = std::move(work);
    return f;
}

double SpectralScale::norm_hs(const ScalarField& f, double s) const {
    check_sobolev_order(s);
    const Eigen::VectorXd c = to_cos(f);
    double acc = 0.0;
    for (long k = 0; k < c.size(); ++k) acc += std::pow(1.0 + mu_flat_[k], s) * c[k] * c[k];
    return std::sqrt(acc);
}

double SpectralScale::norm_hs_tilde(const ScalarField& v, double s) const {
    check_sobolev_order(s);
    const Eigen::VectorXd c = to_sin(v);
    double acc = 0.0;
    for (long k = 0; k < c.size(); ++k) acc += std::pow(1.0 + lam_flat_[k], s) * c[k] * c[k];
    return std::sqrt(acc);
}

double SpectralScale::norm_dual(const ScalarField& load, double s) const {
    check_sobolev_order(s);
    const Eigen::VectorXd c = to_sin(load);
    double acc = 0.0;
    for (long k = 0; k < c.size(); ++k) acc += std::pow(1.0 + lam_flat_[k], s - 1.0) * c[k] * c[k];
    return std::sqrt(acc);
}

double SpectralScale::norm_dual_cell(const ScalarField& f, double s) const {
    check_sobolev_order(s);
    const Eigen::VectorXd c = to_cos(f);
    double acc = 0.0;
    for (long k = 0; k < c.size(); ++k) acc += std::pow(1.0 + mu_flat_[k], -s) * c[k] * c[k];
    return std::sqrt(acc);
}

double SpectralScale::pair(const ScalarField& a, const ScalarField& b) const {
    require_compatible(a, b, "pair");
    double weight = 1.0;
    for (int ax = 0; ax < grid_.dim; ++ax) weight *= grid_.spacing();
    double acc = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) acc += a.values[i] * b.values[i];
    return weight * acc;
}

double SpectralScale::mean(const ScalarField& f) const {
    double weight = 1.0;
    for (int ax = 0; ax < grid_.dim; ++ax) weight *= grid_.spacing();
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return weight * acc;
}

ScalarField project_mean_zero(const SpectralScale& scale, const ScalarField& f) {
    const GridSpec& grid = scale.grid();
    if (f.layout == full_layout(grid.dim)) {
        // <1,1> = 1 on the cell lattice, so the mean is the projection weight.
        ScalarField out = f;
        const double m = scale.mean(f);
        for (double& v : out.values) v -= m;
        return out;
    }
    if (f.layout == interior_layout(grid.dim)) {
        ScalarField out = f;
        double acc = 0.0;
        for (double v : f.values) acc += v;
        const double avg = acc / static_cast<double>(f.values.size());
        for (double& v : out.values) v -= avg;
        return out;
    }
    throw ConfigError("project_mean_zero: expected a full or interior layout, got " +
                      layout_name(f.layout));
}

}  // namespace trdevdiv
