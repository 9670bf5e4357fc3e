#include "trdevdiv/grid.hpp"

#include <numeric>

namespace trdevdiv {

long GridSpec::full_count() const {
    long c = 1;
    for (int a = 0; a < dim; ++a) c *= resolution;
    return c;
}

long GridSpec::interior_count() const {
    long c = 1;
    for (int a = 0; a < dim; ++a) c *= resolution - 1;
    return c;
}

GridSpec build_grid(int dim, int resolution) {
    if (dim != 2 && dim != 3)
        throw ConfigError("unsupported dimension " + std::to_string(dim) + " (expected 2 or 3)");
    if (resolution < 4)
        throw ConfigError("resolution " + std::to_string(resolution) + " too coarse (minimum 4)");
    return GridSpec{dim, resolution};
}

Layout full_layout(int dim) { return Layout(static_cast<size_t>(dim), AxisKind::Cell); }
Layout interior_layout(int dim) { return Layout(static_cast<size_t>(dim), AxisKind::Interior); }
Layout node_layout(int dim) { return Layout(static_cast<size_t>(dim), AxisKind::Node); }

Layout staggered_layout(int dim, int axis) {
    Layout lay = interior_layout(dim);
    lay[static_cast<size_t>(axis)] = AxisKind::Cell;
    return lay;
}

int axis_points(AxisKind kind, int resolution) {
    switch (kind) {
        case AxisKind::Cell: return resolution;
        case AxisKind::Interior: return resolution - 1;
        case AxisKind::Node: return resolution + 1;
    }
    return 0;
}

std::vector<int> layout_extents(const Layout& layout, int resolution) {
    std::vector<int> ext;
    ext.reserve(layout.size());
    for (AxisKind k : layout) ext.push_back(axis_points(k, resolution));
    return ext;
}

long layout_size(const Layout& layout, int resolution) {
    long total = 1;
    for (AxisKind k : layout) total *= axis_points(k, resolution);
    return total;
}

std::string layout_name(const Layout& layout) {
    bool all_cell = true, all_int = true, all_node = true;
    for (AxisKind k : layout) {
        all_cell &= k == AxisKind::Cell;
        all_int &= k == AxisKind::Interior;
        all_node &= k == AxisKind::Node;
    }
    if (all_cell) return "full";
    if (all_int) return "interior";
    if (all_node) return "node";
    std::string s = "staggered:";
    for (AxisKind k : layout)
        s += (k == AxisKind::Cell ? 'c' : (k == AxisKind::Interior ? 'i' : 'n'));
    return s;
}

void check_sobolev_order(double s) {
    if (!(s >= 0.0 && s <= 1.0))
        throw ConfigError("Sobolev order s = " + std::to_string(s) + " outside [0, 1]");
}

}  // namespace trdevdiv
