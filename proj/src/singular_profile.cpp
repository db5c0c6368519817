#include "sbmlab/singular_profile.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace sbm {

namespace {

using State = std::array<double, 2>;

// f'' = -xi f' - 2 f + f^2
State rhs(double xi, const State& y) { return {y[1], -xi * y[1] - 2.0 * y[0] + y[0] * y[0]}; }

State rk4(double xi, const State& y, double h) {
    const State k1 = rhs(xi, y);
    const State k2 = rhs(xi + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
    const State k3 = rhs(xi + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
    const State k4 = rhs(xi + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    return {y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

enum class Outcome { Crossed, Positive, Blowup };

// Crossing zero means f(0) is below the very singular value; staying
// positive (slow algebraic tail) or growing means it is above.
Outcome shoot(double f0, double xi_end, double h) {
    State y{f0, 0.0};
    const auto steps = static_cast<long>(std::llround(xi_end / h));
    for (long k = 0; k < steps; ++k) {
        y = rk4(static_cast<double>(k) * h, y, h);
        if (y[0] < 0.0) return Outcome::Crossed;
        if (y[0] > 4.0) return Outcome::Blowup;
    }
    return Outcome::Positive;
}

double bisect_f0(double xi_end, double h) {
    double lo = 0.5;
    double hi = 2.0;
    if (shoot(lo, xi_end, h) != Outcome::Crossed || shoot(hi, xi_end, h) == Outcome::Crossed)
        throw ShootingFailure("very singular profile: initial bracket [0.5, 2] does not straddle the separatrix");
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (shoot(mid, xi_end, h) == Outcome::Crossed)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

void tabulate(SingularProfile& p, double f0) {
    const auto n = static_cast<std::size_t>(std::llround(p.xi_max / p.step));
    p.f.assign(n + 1, 0.0);
    p.df.assign(n + 1, 0.0);
    State y{f0, 0.0};
    p.f[0] = y[0];
    for (std::size_t k = 0; k < n; ++k) {
        y = rk4(static_cast<double>(k) * p.step, y, p.step);
        p.f[k + 1] = y[0];
        p.df[k + 1] = y[1];
    }
}

}  // namespace

double SingularProfile::value(double xi) const {
    xi = std::abs(xi);
    if (xi >= xi_max) return tail_constant * xi * std::exp(-0.5 * xi * xi);
    const double pos = xi / step;
    auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= f.size()) k = f.size() - 2;
    const double s = pos - static_cast<double>(k);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * f[k] + h10 * step * df[k] + h01 * f[k + 1] + h11 * step * df[k + 1];
}

double SingularProfile::derivative(double xi) const {
    const double sign = xi < 0.0 ? -1.0 : 1.0;
    xi = std::abs(xi);
    if (xi >= xi_max) return sign * tail_constant * (1.0 - xi * xi) * std::exp(-0.5 * xi * xi);
    const double pos = xi / step;
    auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= f.size()) k = f.size() - 2;
    const double s = pos - static_cast<double>(k);
    const double d00 = 6.0 * s * s - 6.0 * s;
    const double d10 = 3.0 * s * s - 4.0 * s + 1.0;
    const double d01 = -6.0 * s * s + 6.0 * s;
    const double d11 = 3.0 * s * s - 2.0 * s;
    return sign * ((d00 * f[k] + d01 * f[k + 1]) / step + d10 * df[k] + d11 * df[k + 1]);
}

SingularProfile very_singular_profile(double xi_max, double tol) {
    if (!(xi_max >= 6.0)) throw std::invalid_argument(fmt::format("profile table needs xi_max >= 6, got {}", xi_max));
    if (!(tol > 0.0)) throw std::invalid_argument("profile tolerance must be positive");
    // The separatrix is detected well past the table so the algebraic
    // (non-singular) branch has time to dominate the Gaussian tail.
    const double xi_end = xi_max + 6.0;

    double h = 2e-3;
    double f0 = bisect_f0(xi_end, h);
    for (int refine = 0; refine < 6; ++refine) {
        const double f0_half = bisect_f0(xi_end, 0.5 * h);
        const double change = std::abs(f0_half - f0);
        h *= 0.5;
        f0 = f0_half;
        if (change < tol) break;
    }

    SingularProfile p;
    p.step = h;
    p.xi_max = xi_max;
    tabulate(p, f0);
    if (p.f.back() <= 0.0) throw ShootingFailure("very singular profile is not positive on the table");
    const double xm = xi_max;
    p.tail_constant = p.f.back() / (xm * std::exp(-0.5 * xm * xm));

    // Simpson on the table (even panel count enforced), closed-form tail.
    const std::size_t n = p.f.size() - 1;
    double simpson = 0.0;
    const std::size_t even = n - (n % 2);
    for (std::size_t k = 0; k < even; k += 2) simpson += p.f[k] + 4.0 * p.f[k + 1] + p.f[k + 2];
    simpson *= p.step / 3.0;
    if (even != n) simpson += 0.5 * p.step * (p.f[n - 1] + p.f[n]);
    p.half_mass = simpson + p.tail_constant * std::exp(-0.5 * xm * xm);
    return p;
}

double profile_residual(const SingularProfile& p) {
    const double h = p.step;
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < p.f.size(); ++k) {
        const double xi = static_cast<double>(k) * h;
        const double d1 = (-p.f[k + 2] + 8.0 * p.f[k + 1] - 8.0 * p.f[k - 1] + p.f[k - 2]) / (12.0 * h);
        const double d2 =
            (-p.f[k + 2] + 16.0 * p.f[k + 1] - 30.0 * p.f[k] + 16.0 * p.f[k - 1] - p.f[k - 2]) / (12.0 * h * h);
        const double r = 0.5 * d2 + 0.5 * xi * d1 + p.f[k] - 0.5 * p.f[k] * p.f[k];
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double very_singular_solution(double t, double r, const SingularProfile& profile) {
    if (!(t > 0.0)) throw std::domain_error(fmt::format("very singular solution needs t > 0, got {}", t));
    return profile.value(std::abs(r) / std::sqrt(t)) / t;
}

double very_singular_mass(double t, const SingularProfile& profile) {
    if (!(t > 0.0)) throw std::domain_error(fmt::format("very singular mass needs t > 0, got {}", t));
    return profile.mass_coefficient() / std::sqrt(t);
}

double very_singular_mass_integral(double t, const SingularProfile& profile) {
    if (!(t >= 0.0)) throw std::domain_error("mass integral needs t >= 0");
    return 2.0 * profile.mass_coefficient() * std::sqrt(t);
}

void add_very_singular(Field& v, double center, double t, const SingularProfile& profile) {
    const double inv_sqrt = 1.0 / std::sqrt(t);
    for (std::size_t i = 1; i + 1 < v.grid.size(); ++i)
        v.values[i] += profile.value((v.grid.x(i) - center) * inv_sqrt) / t;
}

void write_profile_csv(std::ostream& out, const SingularProfile& profile) {
    out << "# f0=" << fmt::format("{:.17g}", profile.f0()) << " tail_constant="
        << fmt::format("{:.17g}", profile.tail_constant) << '\n';
    out << "xi,f\n";
    for (std::size_t k = 0; k < profile.f.size(); ++k)
        out << fmt::format("{:.17g},{:.17g}\n", static_cast<double>(k) * profile.step, profile.f[k]);
}

}  // namespace sbm
