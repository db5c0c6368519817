#pragma once

#include "sbmlab/drift.hpp"
#include "sbmlab/rng.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sbm {

/// How the drift is read at x = 0.
///  Strict: the boundary value b0 (a path sitting at 0 with b0 = 0 stays there).
///  Escape: the one-sided value b1 from the right, letting the path leave 0.
enum class ZeroPolicy { Strict, Escape };

ZeroPolicy parse_zero_policy(const std::string& name);

struct SdePath {
    double dt = 0.0;
    std::vector<double> values;  // values[m] at time m * dt, m = 0..steps

    double horizon() const { return dt * static_cast<double>(values.size() - 1); }
};

/// Euler-Maruyama for dx = h(x) dt + sqrt(x) dB with clipping at 0.
SdePath simulate_sde(const DriftSpec& drift, double x0, double dt, double horizon, RngStream& rng,
                     ZeroPolicy policy = ZeroPolicy::Strict);

/// Exact y_t = B_t^2 / 2 on the same time grid.
SdePath sample_half_squared_bm(double dt, double horizon, RngStream& rng);

/// dt * #{m < steps : x_m <= eps}.
double occupation_time_at_zero(const SdePath& path, double eps = 0.0);

/// "t,x" rows.
void write_sde_csv(std::ostream& out, const SdePath& path);

}  // namespace sbm
