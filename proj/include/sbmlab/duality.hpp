#pragma once

#include "sbmlab/dual_process.hpp"
#include "sbmlab/log_laplace.hpp"
#include "sbmlab/singular_profile.hpp"
#include "sbmlab/spde.hpp"
#include "sbmlab/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sbm {

struct McParams {
    std::size_t paths = 10'000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Runs `paths` SPDE paths (stream ids offset + i) and accumulates
/// exp(-<X_t, mu_j>) for every test measure, plus the final mass.
struct SpdeMcResult {
    std::vector<Accumulator> functionals;  // one per test measure
    Accumulator final_mass;
    std::vector<Accumulator> snapshot_mass;  // one per params.snapshot_times entry
    double clipped_mass = 0.0;
};
SpdeMcResult spde_monte_carlo(const Field& x0, const std::vector<std::vector<PointMass>>& mus, const SpdeParams& params,
                              const McParams& mc, std::uint64_t stream_offset = 0);

struct DualityReport {
    std::string kind;
    double t = 0.0;
    std::vector<PointMass> mu;
    double lhs = 0.0;         // SPDE side
    double lhs_stderr = 0.0;
    double lhs_coarse = 0.0;  // SPDE side at twice the step, for the bias budget
    double bias_budget = 0.0;
    double rhs = 0.0;
    double rhs_stderr = 0.0;  // 0 for deterministic right-hand sides
    double tolerance = 0.0;
    bool pass = false;
};

/// E exp(-<X_t, mu>) against exp(-<X_0, V_t(mu)>); the SPDE side is run at
/// dt and dt/2 and the tolerance is 3 stderr(dt/2) + |L(dt) - L(dt/2)|.
std::vector<DualityReport> duality_h0(const Field& x0, const std::vector<std::vector<PointMass>>& mus, double t,
                                      const SpdeParams& spde, const FlowOptions& pde, const McParams& mc);

/// Same with immigration h = a_const: right-hand side
/// exp(-<X_0, V_t(mu)> - a int_0^t <V_s(mu), 1> ds).
std::vector<DualityReport> duality_const_immigration(const Field& x0, const std::vector<std::vector<PointMass>>& mus,
                                                     double a_const, double t, const SpdeParams& spde,
                                                     const FlowOptions& pde, const McParams& mc);

struct LevelEstimate {
    TruncationLevel level = TruncationLevel::infinity();
    Accumulator signed_value;
    double odd_fraction = 0.0;
    double mean_jumps = 0.0;
    std::size_t max_jumps = 0;
    double cauchy_to_next = -1.0;         // |RHS(n) - RHS(next n)| (paired)
    double cauchy_stderr = 0.0;
    bool variance_flag = false;           // stderr / |mean| > 1
};

struct FullDualityReport {
    double t = 0.0;
    std::vector<PointMass> mu;
    double lhs = 0.0;
    double lhs_stderr = 0.0;
    std::vector<LevelEstimate> levels;
    double rhs = 0.0;  // value at the last level
    double rhs_stderr = 0.0;
    double combined_sigma = 0.0;
    bool cauchy_decreasing = false;
    bool pass = false;
};

/// LHS: SPDE with drift h (spde.drift) from x0. RHS per level: dual paths from
/// Y0 = mu with (-1)^J exp(-<X_0, Y_t> - a int_0^t <Y_s,1> ds). Levels share
/// path seeds. Pass: |LHS - RHS(last level)| <= 3 sqrt(se_L^2 + se_R^2).
FullDualityReport duality_full(const Field& x0, const std::vector<PointMass>& mu, double t, const SpdeParams& spde,
                               const DualConfig& dual, const std::vector<TruncationLevel>& levels,
                               const McParams& lhs_mc, const McParams& rhs_mc);

struct ExtinctionReport {
    double t = 0.0;
    double x = 0.0;
    double a = 0.0;
    double closed_form = 0.0;  // exp(-<W_t(x, .), X0> - a int_0^t <W_s, 1> ds)
    std::vector<std::pair<double, double>> sweep;  // (m, exp(-<X0, V_t(m delta_x)> - a int <V_s, 1>))
};

/// Closed-form value from the profile plus the monotone m-sweep cross-check.
ExtinctionReport extinction_probability(const Field& x0, double x, double t, double a_const,
                                        const SingularProfile& profile, const FlowOptions& pde,
                                        const std::vector<double>& ms = {1, 4, 16, 64, 256});

nlohmann::json to_json(const DualityReport& r);
nlohmann::json to_json(const FullDualityReport& r);
nlohmann::json to_json(const ExtinctionReport& r);

}  // namespace sbm
