#pragma once

#include "sbmlab/dual_process.hpp"
#include "sbmlab/log_laplace.hpp"
#include "sbmlab/rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace sbm {

/// Piecewise-linear mass curve t -> <Y_t, 1> with its trapezoid integral.
/// Repeated times (jumps) are allowed and contribute nothing to the integral.
class MassCurve {
public:
    MassCurve() = default;
    MassCurve(std::vector<double> times, std::vector<double> masses);

    double value(double t) const;
    /// int_0^t mass, exact for the piecewise-linear interpolant.
    double integral(double t) const;
    /// Smallest t with integral(t) >= target, or +inf beyond the last time.
    double inverse_integral(double target) const;

    double end_time() const { return times_.empty() ? 0.0 : times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& masses() const { return masses_; }

private:
    std::vector<double> times_;
    std::vector<double> masses_;
    std::vector<double> cumulative_;
};

/// Mass curve of the jump-free flow V_t(init) on [0, horizon].
MassCurve flow_mass_curve(const Grid1D& grid, const InitialData& init, double horizon, const FlowOptions& options);

struct Particle {
    std::int64_t parent = -1;  // -1 for the root
    int generation = 0;        // root is generation 0
    std::uint32_t ordinal = 0; // position among the parent's children
    double birth_time = 0.0;
};

struct BranchingRecord {
    double horizon = 0.0;
    std::vector<Particle> particles;  // particles[0] is the root
    bool capped = false;

    /// |I_t|: particles born at or before t (nobody dies).
    std::size_t alive(double t) const;
    /// |I_t^i| for i = 0, 1, ...
    std::vector<std::size_t> generation_counts(double t) const;
    /// Integer-tuple label (1, c_1, c_2, ...) of particle `index`.
    std::vector<std::uint32_t> label(std::size_t index) const;
};

struct BranchingParams {
    double horizon = 0.2;
    double nu_bar = 1.0;
    /// <W_s(0,0), 1> = mass_coefficient / sqrt(s).
    double mass_coefficient = 0.0;
    std::size_t population_cap = 1'000'000;
};

/// The root gives birth at rate nu_bar <V_s(Y0), 1> (from `root_curve`), every
/// later particle born at tau at rate nu_bar * mass_coefficient / sqrt(s - tau).
BranchingRecord simulate_branching(const MassCurve& root_curve, const BranchingParams& params, RngStream& rng);

/// lambda(T) = nu_bar (int_0^T <W_s,1> ds + int_0^T <V_s(Y0),1> ds).
double branching_lambda(const MassCurve& root_curve, const BranchingParams& params);

/// P(Z = k) = exp(-lambda k) (lambda k)^(k-1) / k!, evaluated in log space.
double borel_tanner_pmf(double lambda, std::uint64_t k);

/// Total progeny of a Poisson(lambda) Galton-Watson tree, 0 < lambda < 1.
std::uint64_t total_progeny_sample(RngStream& rng, double lambda);

struct CouplingReport {
    std::vector<double> dual_times;  // T_i of the dual path
    std::vector<double> hat_times;   // R_i of the dominating system (up to K + 1)
    std::size_t time_violations = 0;
    std::size_t mass_violations = 0;
    double worst_time_margin = 0.0;  // max over i of (R_i - T_i) / T_i
    double worst_mass_margin = 0.0;  // max over t of (I_Y(t) - I_hat(t)) / I_hat(t)
};

/// Feeds the clocks S_k of `path` into the dominating system whose mass is
/// <V_t(Y0),1> + sum_k mass_coefficient / sqrt(t - R_k), and compares the
/// event times and integrated masses. `free_flow` is the jump-free V(Y0) curve.
CouplingReport couple_with_branching(const DualPath& path, const MassCurve& free_flow, double mass_coefficient,
                                     double rel_slack = 1e-6);

void write_branching_csv(std::ostream& out, const BranchingRecord& record);

}  // namespace sbm
