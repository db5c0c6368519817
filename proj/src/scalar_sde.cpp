#include "sbmlab/scalar_sde.hpp"

#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace sbm {

ZeroPolicy parse_zero_policy(const std::string& name) {
    if (name == "strict") return ZeroPolicy::Strict;
    if (name == "escape") return ZeroPolicy::Escape;
    throw std::invalid_argument(fmt::format("unknown zero policy '{}'", name));
}

namespace {

std::size_t step_count(double dt, double horizon) {
    if (!(dt > 0.0)) throw std::invalid_argument(fmt::format("sde dt must be positive, got {}", dt));
    if (!(horizon > 0.0)) throw std::invalid_argument(fmt::format("sde horizon must be positive, got {}", horizon));
    return static_cast<std::size_t>(std::max(1.0, std::round(horizon / dt)));
}

}  // namespace

SdePath simulate_sde(const DriftSpec& drift, double x0, double dt, double horizon, RngStream& rng,
                     ZeroPolicy policy) {
    if (!(x0 >= 0.0)) throw std::invalid_argument(fmt::format("sde start must be >= 0, got {}", x0));
    const std::size_t steps = step_count(dt, horizon);
    SdePath path;
    path.dt = horizon / static_cast<double>(steps);
    path.values.reserve(steps + 1);
    double x = x0;
    path.values.push_back(x);
    const double sq = std::sqrt(path.dt);
    for (std::size_t m = 0; m < steps; ++m) {
        double h;
        if (x == 0.0 && policy == ZeroPolicy::Escape) {
            h = drift.b1() + drift.nu2().laplace(0.0) - drift.nu1().laplace(0.0);
        } else {
            h = eval_drift(x, drift);
        }
        const double xi = rng.normal();
        x = x + h * path.dt + std::sqrt(x) * sq * xi;
        if (!std::isfinite(x)) throw std::runtime_error(fmt::format("sde path became non-finite at step {}", m));
        if (x < 0.0) x = 0.0;
        path.values.push_back(x);
    }
    return path;
}

SdePath sample_half_squared_bm(double dt, double horizon, RngStream& rng) {
    const std::size_t steps = step_count(dt, horizon);
    SdePath path;
    path.dt = horizon / static_cast<double>(steps);
    path.values.reserve(steps + 1);
    const double sq = std::sqrt(path.dt);
    double b = 0.0;
    path.values.push_back(0.0);
    for (std::size_t m = 0; m < steps; ++m) {
        b += sq * rng.normal();
        path.values.push_back(0.5 * b * b);
    }
    return path;
}

double occupation_time_at_zero(const SdePath& path, double eps) {
    std::size_t count = 0;
    for (std::size_t m = 0; m + 1 < path.values.size(); ++m)
        if (path.values[m] <= eps) ++count;
    return path.dt * static_cast<double>(count);
}

void write_sde_csv(std::ostream& out, const SdePath& path) {
    out << "t,x\n";
    for (std::size_t m = 0; m < path.values.size(); ++m)
        out << fmt::format("{:.17g},{:.17g}\n", path.dt * static_cast<double>(m), path.values[m]);
}

}  // namespace sbm
