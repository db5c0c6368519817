#pragma once

#include "sbmlab/grid.hpp"

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace sbm {

class ShootingFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Self-similar profile f of the very singular solution W_t(r) = t^{-1} f(t^{-1/2} |r|).
///
/// f solves  (1/2) f'' + (1/2) xi f' + f - (1/2) f^2 = 0,  f'(0) = 0,
/// and decays like C xi exp(-xi^2 / 2). Values on [0, xi_max] come from a
/// uniform table (cubic Hermite interpolation); beyond xi_max the tail
/// formula with the fitted constant C is used.
struct SingularProfile {
    double step = 0.0;
    double xi_max = 0.0;
    std::vector<double> f;
    std::vector<double> df;
    double tail_constant = 0.0;
    /// int_0^inf f(xi) d xi, so that <W_t, 1> = 2 * half_mass / sqrt(t).
    double half_mass = 0.0;

    double f0() const { return f.front(); }
    double value(double xi) const;
    double derivative(double xi) const;
    /// <W_t, 1> * sqrt(t).
    double mass_coefficient() const { return 2.0 * half_mass; }
};

/// Shooting on f(0) with a step-halving RK4 integrator.
/// Requires xi_max >= 6; throws ShootingFailure if the bracket does not close.
SingularProfile very_singular_profile(double xi_max = 6.0, double tol = 1e-10);

/// Max |(1/2) f'' + (1/2) xi f' + f - (1/2) f^2| over interior table nodes,
/// with f', f'' from fourth-order central differences of the tabulated f.
double profile_residual(const SingularProfile& profile);

/// W_t(r) = t^{-1} f(t^{-1/2} |r|).
double very_singular_solution(double t, double r, const SingularProfile& profile);
/// <W_t(x, 0), 1> = mass_coefficient / sqrt(t).
double very_singular_mass(double t, const SingularProfile& profile);
/// int_0^t <W_s, 1> ds = 2 mass_coefficient sqrt(t).
double very_singular_mass_integral(double t, const SingularProfile& profile);

/// Adds W_t(. - center) sampled on the grid nodes.
void add_very_singular(Field& v, double center, double t, const SingularProfile& profile);

/// CSV export "xi,f" of the table.
void write_profile_csv(std::ostream& out, const SingularProfile& profile);

}  // namespace sbm
