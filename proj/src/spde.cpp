#include "sbmlab/spde.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace sbm {

NoiseScheme parse_noise_scheme(const std::string& name) {
    if (name == "feller") return NoiseScheme::Feller;
    if (name == "euler_clip") return NoiseScheme::EulerClip;
    if (name == "feller_coupled") return NoiseScheme::FellerCoupled;
    throw std::invalid_argument(fmt::format("unknown noise scheme '{}'", name));
}

std::string to_string(NoiseScheme scheme) {
    switch (scheme) {
        case NoiseScheme::Feller: return "feller";
        case NoiseScheme::EulerClip: return "euler_clip";
        case NoiseScheme::FellerCoupled: return "feller_coupled";
    }
    return "?";
}

std::size_t spde_step_count(const SpdeParams& p) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(p.horizon / p.dt - 1e-9)));
}

void validate(const SpdeParams& p) {
    if (!(p.horizon > 0.0)) throw std::invalid_argument(fmt::format("spde horizon must be positive, got {}", p.horizon));
    if (!(p.dt > 0.0)) throw std::invalid_argument(fmt::format("spde dt must be positive, got {}", p.dt));
    const double dx = p.grid.dx();
    if (p.dt > 0.5 * dx * dx * (1.0 + 1e-12))
        throw std::invalid_argument(
            fmt::format("explicit scheme unstable: dt = {} exceeds dx^2/2 = {}", p.dt, 0.5 * dx * dx));
    if (!(p.noise_scale >= 0.0)) throw std::invalid_argument("noise scale must be nonnegative");
    if (!(p.zero_threshold >= 0.0)) throw std::invalid_argument("zero threshold must be nonnegative");
}

SpdePath simulate_spde(const Field& x0, const SpdeParams& p, RngStream& rng) {
    validate(p);
    if (!(x0.grid == p.grid)) throw std::invalid_argument("spde initial field lives on a different grid");
    for (double v : x0.values)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("spde initial field must be finite and >= 0");

    const std::size_t n = p.grid.size();
    const double dx = p.grid.dx();
    const std::size_t steps = spde_step_count(p);
    const double dt = p.horizon / static_cast<double>(steps);
    const double r = 0.5 * dt / (dx * dx);
    const double sigma2 = p.noise_scale * p.noise_scale / dx;  // lattice noise variance rate
    const double eps0 = p.zero_threshold;

    std::function<double(double)> h;
    const bool plain_step = p.drift.nu1().empty() && p.drift.nu2().empty() && p.level.is_infinite();
    if (plain_step) {
        const double b0 = p.drift.b0();
        const double b1 = p.drift.b1();
        h = [b0, b1](double x) { return x == 0.0 ? b0 : b1; };
    } else if (p.level.is_infinite()) {
        h = [&p](double x) { return eval_drift(x, p.drift); };
    } else {
        h = [&p](double x) { return eval_drift_truncated(x, p.drift, p.level); };
    }

    std::vector<std::size_t> snap_steps;
    for (double t : p.snapshot_times) {
        if (t < 0.0 || t > p.horizon * (1.0 + 1e-12))
            throw std::invalid_argument(fmt::format("snapshot time {} outside [0, {}]", t, p.horizon));
        snap_steps.push_back(static_cast<std::size_t>(std::llround(t / dt)));
    }

    SpdePath path(p.grid);
    std::vector<double> x = x0.values;
    x[0] = 0.0;
    x[n - 1] = 0.0;
    std::vector<double> y(n, 0.0);
    auto snapshot_at = [&](std::size_t m) {
        for (std::size_t k = 0; k < snap_steps.size(); ++k)
            if (snap_steps[k] == m) path.snapshots.emplace_back(p.snapshot_times[k], Field(p.grid, x));
    };
    if (p.record_mass) path.masses.push_back(mass(x, dx));
    snapshot_at(0);

    for (std::size_t m = 1; m <= steps; ++m) {
        // Explicit half-Laplacian plus drift; the tie x = 0 is read off before the step.
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double xi = x[i] <= eps0 ? 0.0 : x[i];
            double v = x[i] + r * (x[i - 1] - 2.0 * x[i] + x[i + 1]) + dt * h(xi);
            if (v < 0.0) {
                path.min_before_clip = std::min(path.min_before_clip, v);
                path.clipped_mass -= v * dx;
                v = 0.0;
            }
            y[i] = v;
        }
        if (sigma2 > 0.0) {
            switch (p.scheme) {
                case NoiseScheme::Feller: {
                    const double rate = 2.0 / (sigma2 * dt);
                    const double scale = 0.5 * sigma2 * dt;
                    for (std::size_t i = 1; i + 1 < n; ++i) {
                        if (y[i] <= 0.0) continue;
                        const std::uint64_t k = rng.poisson(y[i] * rate);
                        y[i] = k == 0 ? 0.0 : rng.gamma(static_cast<double>(k)) * scale;
                    }
                    break;
                }
                case NoiseScheme::FellerCoupled: {
                    const double rate = 2.0 / (sigma2 * dt);
                    const double scale = 0.5 * sigma2 * dt;
                    for (std::size_t i = 1; i + 1 < n; ++i) {
                        const double u1 = rng.uniform();
                        const double u2 = rng.uniform();
                        if (y[i] <= 0.0) continue;
                        const std::uint64_t k = poisson_quantile(y[i] * rate, u1);
                        y[i] = k == 0 ? 0.0 : gamma_quantile(static_cast<double>(k), u2) * scale;
                    }
                    break;
                }
                case NoiseScheme::EulerClip: {
                    const double amp = std::sqrt(sigma2 * dt);
                    for (std::size_t i = 1; i + 1 < n; ++i) {
                        const double xi = rng.normal();
                        double v = y[i] + amp * std::sqrt(y[i]) * xi;
                        if (v < 0.0) {
                            path.min_before_clip = std::min(path.min_before_clip, v);
                            path.clipped_mass -= v * dx;
                            v = 0.0;
                        }
                        y[i] = v;
                    }
                    break;
                }
            }
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (!std::isfinite(y[i]))
                throw SpdeAbort(fmt::format("non-finite value at node {} (x = {}) in step {} (t = {})", i,
                                            p.grid.x(i), m, static_cast<double>(m) * dt));
        }
        std::swap(x, y);
        x[0] = 0.0;
        x[n - 1] = 0.0;
        if (p.record_mass) path.masses.push_back(mass(x, dx));
        snapshot_at(m);
    }
    path.steps = steps;
    path.final_field = Field(p.grid, std::move(x));
    return path;
}

double laplace_functional(const Field& x, const std::vector<PointMass>& mu) {
    double s = 0.0;
    for (const auto& atom : mu) s += atom.mass * x.values[x.grid.nearest(atom.location)];
    return std::exp(-s);
}

double ctem_norm(const Field& x, double lam) {
    if (!(lam < 0.0)) throw std::invalid_argument(fmt::format("C_tem weight needs lam < 0, got {}", lam));
    double best = 0.0;
    for (std::size_t i = 0; i < x.values.size(); ++i)
        best = std::max(best, std::exp(lam * std::abs(x.grid.x(i))) * x.values[i]);
    return best;
}

double cozero_measure(const Field& x, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("cozero threshold must be nonnegative");
    const auto count = std::count_if(x.values.begin(), x.values.end(), [eps](double v) { return v > eps; });
    return x.grid.dx() * static_cast<double>(count);
}

void write_field_csv(std::ostream& out, const Field& field) {
    out << "x,value\n";
    for (std::size_t i = 0; i < field.values.size(); ++i)
        out << fmt::format("{:.17g},{:.17g}\n", field.grid.x(i), field.values[i]);
}

}  // namespace sbm
