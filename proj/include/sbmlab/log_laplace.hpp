#pragma once

#include "sbmlab/grid.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sbm {

/// Gaussian transition density p_t(x) = (2 pi t)^{-1/2} exp(-x^2 / (2t)).
double heat_kernel(double t, double x);

/// Exact flow of v' = -v^2/2 over time tau, pointwise: v / (1 + v tau / 2).
void reaction_substep(std::span<double> v, double tau);
Field reaction_substep(const Field& v, double tau);

enum class HeatScheme { CrankNicolson, BackwardEuler };

struct HeatStepStats {
    double clipped_mass = 0.0;   // mass added by clipping negatives to zero
    double boundary_flux = 0.0;  // mass lost through the Dirichlet ends
};

/// theta-scheme for d_t v = (1/2) v_xx with v = 0 at both end nodes.
/// The tridiagonal system has constant coefficients, so its Thomas
/// factorization is computed once per (grid, tau, scheme).
class HeatPropagator {
public:
    HeatPropagator(const Grid1D& grid, double tau, HeatScheme scheme);

    void apply(std::span<double> v, HeatStepStats* stats = nullptr) const;

    double tau() const { return tau_; }
    HeatScheme scheme() const { return scheme_; }

private:
    double dx_;
    double tau_;
    HeatScheme scheme_;
    double explicit_weight_;  // (1 - theta) r
    double off_;              // -theta r
    std::vector<double> inv_denominator_;
    std::vector<double> upper_;
    mutable std::vector<double> rhs_;
};

Field heat_substep(const Field& v, double tau, HeatScheme scheme = HeatScheme::CrankNicolson,
                   HeatStepStats* stats = nullptr);

struct FlowOptions {
    double dt = 1e-3;
    /// Number of halvings in the graded backward-Euler start after rough data.
    int startup_levels = 8;
};

struct FlowStats {
    double leaked_mass = 0.0;
    double clipped_mass = 0.0;
};

/// Step-size plan: after rough data (grid deltas, warm starts) the first dt
/// is covered by graded backward-Euler steps dt/2^m, dt/2^m, dt/2^(m-1), ..., dt/2,
/// then Crank-Nicolson steps of size dt.
class StepPlan {
public:
    explicit StepPlan(const FlowOptions& options, bool rough = false);

    void mark_rough() { index_ = 0; }
    bool in_startup() const { return index_ <= levels_; }
    /// Planned step and scheme, capped at `limit`; advances the plan.
    std::pair<double, HeatScheme> next(double limit);
    /// Planned step without advancing.
    double peek() const;

private:
    double dt_;
    int levels_;
    int index_;
};

/// Strang-split solver for d_t V = (1/2) Delta V - (1/2) V^2 on a truncated grid:
/// half reaction (exact), heat step, half reaction.
class LogLaplaceFlow {
public:
    LogLaplaceFlow(const Grid1D& grid, FlowOptions options);

    void step(std::span<double> v, double tau, HeatScheme scheme, FlowStats* stats = nullptr);
    /// Same step with a throwaway propagator (for one-off step sizes such as clock refinement).
    void step_uncached(std::span<double> v, double tau, HeatScheme scheme, FlowStats* stats = nullptr) const;

    const Grid1D& grid() const { return grid_; }
    const FlowOptions& options() const { return options_; }

private:
    const HeatPropagator& propagator(double tau, HeatScheme scheme);

    Grid1D grid_;
    FlowOptions options_;
    std::vector<HeatPropagator> cache_;
};

/// Initial datum: an optional density field plus finite point masses.
struct InitialData {
    std::optional<Field> field;
    std::vector<PointMass> atoms;
};

/// Field representation on `grid`: the density plus grid deltas for the atoms.
Field regularize(const Grid1D& grid, const InitialData& init);

struct EvolveResult {
    Field field;
    double mass_integral = 0.0;  // trapezoid value of int_0^t <V_s, 1> ds
    FlowStats stats;
    std::vector<double> times;   // filled when curves are requested
    std::vector<double> masses;
};

/// V_t(init) by Strang splitting; atoms make the start rough (graded start).
Field evolve(const Grid1D& grid, const InitialData& init, double t, const FlowOptions& options);
EvolveResult evolve_detailed(const Grid1D& grid, const InitialData& init, double t, const FlowOptions& options,
                             bool record_curve = false);
/// Evolves an already-regularized field; `rough` selects the graded start.
EvolveResult evolve_field(Field v, double t, const FlowOptions& options, bool rough, bool record_curve = false);

}  // namespace sbm
