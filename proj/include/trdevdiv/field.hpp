#pragma once

#include <random>
#include <vector>

#include "trdevdiv/grid.hpp"

namespace trdevdiv {

// Scalar-valued grid function on one layout, stored flat in row-major order
// (last axis fastest).
struct ScalarField {
    GridSpec grid;
    Layout layout;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(const GridSpec& g, Layout lay);

    std::vector<int> extents() const { return layout_extents(layout, grid.resolution); }
    long size() const { return static_cast<long>(values.size()); }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double a);
};

ScalarField zeros(const GridSpec& grid, const Layout& layout);
ScalarField constant_field(const GridSpec& grid, const Layout& layout, double value);

// Vector of dim components sharing one layout.
struct VectorField {
    std::vector<ScalarField> comps;

    VectorField() = default;
    VectorField(const GridSpec& grid, const Layout& layout);

    int dim() const { return static_cast<int>(comps.size()); }
};

// dim x dim matrix of scalar fields.  Entries may live on distinct layouts
// (the row-wise gradient is staggered); uniform-layout tensors are the H^s
// data case.  The symmetric flag is advisory and checked where required.
struct TensorField {
    int n = 0;
    std::vector<ScalarField> entries;  // row-major: entries[i*n + j]
    bool symmetric = false;

    TensorField() = default;
    TensorField(const GridSpec& grid, const Layout& layout, int n_);

    ScalarField& at(int i, int j) { return entries[static_cast<size_t>(i) * n + j]; }
    const ScalarField& at(int i, int j) const { return entries[static_cast<size_t>(i) * n + j]; }
};

// Identity matrix field on the cell lattice.
TensorField identity_tensor(const GridSpec& grid);

// I.i.d. standard normal samples; deterministic for a fixed engine state.
ScalarField random_field(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng);
VectorField random_vector(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng);
TensorField random_tensor(const GridSpec& grid, const Layout& layout, std::mt19937_64& rng);

// Checks two fields share grid, layout and size; throws ConfigError otherwise.
void require_compatible(const ScalarField& a, const ScalarField& b, const char* where);
void require_layout(const ScalarField& f, const Layout& expected, const char* where);

}  // namespace trdevdiv
