#include "sbmlab/log_laplace.hpp"

#include <fmt/format.h>

#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sbm {

double heat_kernel(double t, double x) {
    if (!(t > 0.0)) throw std::domain_error(fmt::format("heat kernel needs t > 0, got {}", t));
    return std::exp(-x * x / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
}

void reaction_substep(std::span<double> v, double tau) {
    const double half = 0.5 * tau;
    for (double& value : v) value = value / (1.0 + value * half);
}

Field reaction_substep(const Field& v, double tau) {
    Field out = v;
    reaction_substep(out.span(), tau);
    return out;
}

HeatPropagator::HeatPropagator(const Grid1D& grid, double tau, HeatScheme scheme)
    : dx_(grid.dx()), tau_(tau), scheme_(scheme) {
    if (!(tau > 0.0)) throw std::invalid_argument(fmt::format("heat step needs tau > 0, got {}", tau));
    const double theta = scheme == HeatScheme::CrankNicolson ? 0.5 : 1.0;
    const double r = tau / (2.0 * dx_ * dx_);
    explicit_weight_ = (1.0 - theta) * r;
    off_ = -theta * r;
    const double diag = 1.0 + 2.0 * theta * r;
    const std::size_t m = grid.size() - 2;
    inv_denominator_.resize(m);
    upper_.resize(m);
    rhs_.resize(m);
    double prev_upper = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double denom = diag - off_ * prev_upper;
        assert(denom > 0.0);
        inv_denominator_[i] = 1.0 / denom;
        upper_[i] = off_ * inv_denominator_[i];
        prev_upper = upper_[i];
    }
}

void HeatPropagator::apply(std::span<double> v, HeatStepStats* stats) const {
    const std::size_t n = v.size();
    const std::size_t m = n - 2;
    double before = 0.0;
    if (stats)
        for (double value : v) before += value;
    v[0] = 0.0;
    v[n - 1] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + 1;
        rhs_[i] = v[j] + explicit_weight_ * (v[j + 1] - 2.0 * v[j] + v[j - 1]);
    }
    // Forward sweep then back substitution.
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        prev = (rhs_[i] - off_ * prev) * inv_denominator_[i];
        rhs_[i] = prev;
    }
    for (std::size_t i = m - 1; i-- > 0;) rhs_[i] -= upper_[i] * rhs_[i + 1];
    double after = 0.0;
    double clipped = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double value = rhs_[i];
        after += value;
        if (value < 0.0) {
            clipped -= value;
            value = 0.0;
        }
        v[i + 1] = value;
    }
    if (stats) {
        stats->boundary_flux += (before - after) * dx_;
        stats->clipped_mass += clipped * dx_;
    }
}

Field heat_substep(const Field& v, double tau, HeatScheme scheme, HeatStepStats* stats) {
    Field out = v;
    HeatPropagator(v.grid, tau, scheme).apply(out.span(), stats);
    return out;
}

StepPlan::StepPlan(const FlowOptions& options, bool rough)
    : dt_(options.dt), levels_(std::max(0, options.startup_levels)), index_(rough ? 0 : levels_ + 1) {
    if (!(options.dt >= 1e-9))
        throw std::invalid_argument(fmt::format("time step {} is below the 1e-9 floor", options.dt));
}

double StepPlan::peek() const {
    if (index_ > levels_) return dt_;
    if (index_ == 0) return std::ldexp(dt_, -levels_);
    return std::ldexp(dt_, index_ - levels_ - 1);
}

std::pair<double, HeatScheme> StepPlan::next(double limit) {
    const double planned = peek();
    const HeatScheme scheme = index_ > levels_ ? HeatScheme::CrankNicolson : HeatScheme::BackwardEuler;
    if (index_ <= levels_) ++index_;
    return {std::min(planned, limit), scheme};
}

LogLaplaceFlow::LogLaplaceFlow(const Grid1D& grid, FlowOptions options) : grid_(grid), options_(options) {
    if (!(options_.dt >= 1e-9))
        throw std::invalid_argument(fmt::format("time step {} is below the 1e-9 floor", options_.dt));
}

const HeatPropagator& LogLaplaceFlow::propagator(double tau, HeatScheme scheme) {
    for (const auto& p : cache_)
        if (p.tau() == tau && p.scheme() == scheme) return p;
    if (cache_.size() >= 48) cache_.erase(cache_.begin());
    cache_.emplace_back(grid_, tau, scheme);
    return cache_.back();
}

void LogLaplaceFlow::step(std::span<double> v, double tau, HeatScheme scheme, FlowStats* stats) {
    reaction_substep(v, 0.5 * tau);
    HeatStepStats heat;
    propagator(tau, scheme).apply(v, &heat);
    reaction_substep(v, 0.5 * tau);
    if (stats) {
        stats->leaked_mass += heat.boundary_flux;
        stats->clipped_mass += heat.clipped_mass;
    }
}

void LogLaplaceFlow::step_uncached(std::span<double> v, double tau, HeatScheme scheme, FlowStats* stats) const {
    reaction_substep(v, 0.5 * tau);
    HeatStepStats heat;
    HeatPropagator(grid_, tau, scheme).apply(v, &heat);
    reaction_substep(v, 0.5 * tau);
    if (stats) {
        stats->leaked_mass += heat.boundary_flux;
        stats->clipped_mass += heat.clipped_mass;
    }
}

Field regularize(const Grid1D& grid, const InitialData& init) {
    Field v = init.field ? *init.field : Field::zeros(grid);
    if (!(v.grid == grid)) throw std::invalid_argument("initial field lives on a different grid");
    for (double value : v.values)
        if (!(value >= 0.0) || !std::isfinite(value))
            throw std::invalid_argument("initial field must be finite and nonnegative");
    for (const auto& atom : init.atoms) add_grid_delta(v, atom.location, atom.mass);
    return v;
}

EvolveResult evolve_field(Field v, double t, const FlowOptions& options, bool rough, bool record_curve) {
    if (!(t >= 0.0)) throw std::invalid_argument(fmt::format("evolution time must be nonnegative, got {}", t));
    LogLaplaceFlow flow(v.grid, options);
    StepPlan plan(options, rough);
    EvolveResult result{std::move(v), 0.0, {}, {}, {}};
    const double dx = result.field.grid.dx();
    double now = 0.0;
    double m_prev = mass(result.field.span(), dx);
    if (record_curve) {
        result.times.push_back(0.0);
        result.masses.push_back(m_prev);
    }
    while (t - now > 1e-14 * std::max(1.0, t)) {
        auto [tau, scheme] = plan.next(t - now);
        flow.step(result.field.span(), tau, scheme, &result.stats);
        now += tau;
        const double m_now = mass(result.field.span(), dx);
        result.mass_integral += 0.5 * tau * (m_prev + m_now);
        m_prev = m_now;
        if (record_curve) {
            result.times.push_back(now);
            result.masses.push_back(m_now);
        }
    }
    return result;
}

EvolveResult evolve_detailed(const Grid1D& grid, const InitialData& init, double t, const FlowOptions& options,
                             bool record_curve) {
    return evolve_field(regularize(grid, init), t, options, !init.atoms.empty(), record_curve);
}

Field evolve(const Grid1D& grid, const InitialData& init, double t, const FlowOptions& options) {
    return evolve_detailed(grid, init, t, options).field;
}

}  // namespace sbm
