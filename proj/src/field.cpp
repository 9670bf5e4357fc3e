#include "trdevdiv/field.hpp"

namespace trdevdiv {

ScalarField::ScalarField(const GridSpec& g, Layout lay) : grid(g), layout(std::move(lay)) {
    values.assign(static_cast<size_t>(layout_size(layout, grid.resolution)), 0.0);
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_compatible(*this, other, "operator+=");
    for (size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_compatible(*this, other, "operator-=");
    for (size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& v : values) v *= a;
    return *this;
}

ScalarField zeros(const GridSpec& grid, const Layout& layout) { return ScalarField(grid, layout); }

ScalarField constant_field(const GridSpec& grid, const Layout& layout, double value) {
    ScalarField f(grid, layout);
    for (double& v : f.values) v = value;
    return f;
}

VectorField::VectorField(const GridSpec& grid, const Layout& layout) {
    comps.assign(static_cast<size_t>(grid.dim), ScalarField(grid, layout));
}

TensorField::TensorField(const GridSpec& grid, const Layout& layout, int n_) : n(n_) {
    entries.assign(static_cast<size_t>(n) * static_cast<size_t>(n), ScalarField(grid, layout));
}

TensorField identity_tensor(const GridSpec& grid) {
    TensorField t(grid, full_layout(grid.dim), grid.dim);
    for (int i = 0; i < grid.dim; ++i)
        t.at(i, i) = constant_field(grid, full_layout(grid.dim), 1.0);
    t.symmetric = true;
    return t;
}

ScalarField random_field(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng) {
    ScalarField f(grid, layout);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (double& v : f.values) v = dist(rng);
    return f;
}

VectorField random_vector(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng) {
    VectorField v(grid, layout);
    for (int i = 0; i < grid.dim; ++i) v.comps[static_cast<size_t>(i)] = random_field(grid, layout, rng);
    return v;
}

TensorField random_tensor(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng) {
    TensorField t(grid, layout, grid.dim);
    for (auto& e : t.entries) e = random_field(grid, layout, rng);
    return t;
}

void require_compatible(const ScalarField& a, const ScalarField& b, const char* where) {
    if (a.grid.dim != b.grid.dim || a.grid.resolution != b.grid.resolution)
        throw ConfigError(std::string(where) + ": field grids differ");
    if (a.layout != b.layout)
        throw ConfigError(std::string(where) + ": field layouts differ (" + layout_name(a.layout) +
                          " vs " + layout_name(b.layout) + ")");
}

void require_layout(const ScalarField& f, const Layout& expected, const char* where) {
    if (f.layout != expected)
        throw ConfigError(std::string(where) + ": expected layout " + layout_name(expected) +
                          ", got " + layout_name(f.layout));
}

}  // namespace trdevdiv
