#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sbm {

/// Uniform grid on [-L, L] with N nodes; the two end nodes carry the
/// Dirichlet-zero boundary.
class Grid1D {
public:
    Grid1D(double half_extent, std::size_t nodes);

    double half_extent() const { return half_extent_; }
    std::size_t size() const { return nodes_; }
    double dx() const { return dx_; }
    double x(std::size_t i) const { return -half_extent_ + static_cast<double>(i) * dx_; }
    /// Index of the node closest to `x` (clamped to the grid).
    std::size_t nearest(double x) const;

    bool operator==(const Grid1D& other) const = default;

private:
    double half_extent_;
    std::size_t nodes_;
    double dx_;
};

/// Nonnegative nodal values on a Grid1D.
struct Field {
    Grid1D grid;
    std::vector<double> values;

    explicit Field(Grid1D g) : grid(g), values(g.size(), 0.0) {}
    Field(Grid1D g, std::vector<double> v);

    static Field zeros(const Grid1D& g) { return Field(g); }

    std::span<double> span() { return values; }
    std::span<const double> span() const { return values; }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// <v, 1> = dx * sum of nodal values.
double mass(const Field& v);
double mass(std::span<const double> v, double dx);

/// <f, g> = dx * sum f_i g_i.
double inner(const Field& f, const Field& g);

/// Point mass at `location`; `mass` may be +inf (very singular atom).
struct PointMass {
    double location;
    double mass;
};

/// Adds a grid delta: mass / dx at the node nearest to `location`.
void add_grid_delta(Field& v, double location, double mass);

}  // namespace sbm
