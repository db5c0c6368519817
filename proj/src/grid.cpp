#include "sbmlab/grid.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sbm {

Grid1D::Grid1D(double half_extent, std::size_t nodes) : half_extent_(half_extent), nodes_(nodes) {
    if (!(half_extent > 0.0) || !std::isfinite(half_extent))
        throw std::invalid_argument(fmt::format("grid half-extent must be positive, got {}", half_extent));
    if (nodes < 3) throw std::invalid_argument(fmt::format("grid needs at least 3 nodes, got {}", nodes));
    dx_ = 2.0 * half_extent / static_cast<double>(nodes - 1);
}

std::size_t Grid1D::nearest(double x) const {
    const double pos = std::round((x + half_extent_) / dx_);
    if (pos <= 0.0) return 0;
    if (pos >= static_cast<double>(nodes_ - 1)) return nodes_ - 1;
    return static_cast<std::size_t>(pos);
}

Field::Field(Grid1D g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size())
        throw std::invalid_argument(fmt::format("field has {} values for a {}-node grid", values.size(), grid.size()));
}

double mass(std::span<const double> v, double dx) { return dx * std::accumulate(v.begin(), v.end(), 0.0); }

double mass(const Field& v) { return mass(v.span(), v.grid.dx()); }

double inner(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("inner product of fields on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i];
    return s * f.grid.dx();
}

void add_grid_delta(Field& v, double location, double m) {
    if (!(m >= 0.0) || !std::isfinite(m))
        throw std::invalid_argument(fmt::format("grid delta needs a finite nonnegative mass, got {}", m));
    const std::size_t i = v.grid.nearest(location);
    if (i == 0 || i + 1 == v.grid.size())
        throw std::out_of_range(fmt::format("atom at {} falls on the Dirichlet boundary", location));
    v.values[i] += m / v.grid.dx();
}

}  // namespace sbm
