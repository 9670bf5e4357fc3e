#pragma once

#include <string>
#include <vector>

#include "trdevdiv/errors.hpp"

namespace trdevdiv {

// Structured grid on the unit hypercube [0,1]^dim with `resolution` cells per
// axis (spacing h = 1/resolution exactly).  Two scalar lattices are used:
//
//   * FullGrid: cell centers x_c = (c + 1/2) h, resolution^dim points.  This
//     lattice carries the Neumann (cosine) scale and all H^s-type data.
//   * Interior: interior corner nodes x_i = i h, (resolution-1)^dim points.
//     This lattice carries the Dirichlet (sine) scale, i.e. zero-boundary
//     H~^s-type data.
//
// Staggered lattices (cell-centered along one axis, interior along the
// others) appear as outputs of the row-wise gradient.
struct GridSpec {
    int dim = 2;
    int resolution = 8;

    double spacing() const { return 1.0 / resolution; }
    long full_count() const;      // cell centers: resolution^dim
    long interior_count() const;  // interior nodes: (resolution-1)^dim
};

// Builds and validates a grid.  Throws ConfigError for dim outside {2,3} or
// resolution < 4.
GridSpec build_grid(int dim, int resolution);

// Per-axis lattice tag.  A layout is one tag per axis; the uniform layouts
// below are the common cases, Cell-along-one-axis layouts carry gradient
// components.
enum class AxisKind { Cell, Interior, Node };

using Layout = std::vector<AxisKind>;

Layout full_layout(int dim);            // all Cell
Layout interior_layout(int dim);        // all Interior
Layout node_layout(int dim);            // all Node (corner nodes, elasticity)
Layout staggered_layout(int dim, int axis);  // Cell on `axis`, Interior else

// Number of points along one axis for a tag.
int axis_points(AxisKind kind, int resolution);

// Point counts per axis for a layout.
std::vector<int> layout_extents(const Layout& layout, int resolution);

// Total point count of a layout.
long layout_size(const Layout& layout, int resolution);

std::string layout_name(const Layout& layout);

// Fractional Sobolev order; the model covers 0 <= s <= 1 only.
void check_sobolev_order(double s);

}  // namespace trdevdiv
