#include "sbmlab/dual_process.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sbm {

namespace {

bool done(double t, double end) { return end - t <= 1e-13 * std::max(1.0, end); }

}  // namespace

void apply_jump(RegMeasureState& state, double location, double height, const TruncationLevel& level) {
    if (!(height > 0.0)) throw std::invalid_argument(fmt::format("jump height must be positive, got {}", height));
    if (std::isinf(height) && !level.is_infinite())
        throw std::logic_error(fmt::format("infinite jump height at finite level {}", level.label()));
    state.atoms.push_back({location, height});
}

bool absorb(RegMeasureState& state, double warm_start, const SingularProfile* profile) {
    if (state.atoms.empty()) return false;
    for (const auto& atom : state.atoms) {
        if (std::isinf(atom.mass)) {
            if (!profile) throw std::logic_error("infinite atom without a singular profile");
            if (!(warm_start > 0.0)) throw std::invalid_argument("warm start offset must be positive");
            add_very_singular(state.field, atom.location, warm_start, *profile);
        } else {
            add_grid_delta(state.field, atom.location, atom.mass);
        }
    }
    state.atoms.clear();
    return true;
}

double sample_jump_location(RngStream& rng, const Field& field) {
    const double u = rng.uniform();
    double total = 0.0;
    for (double value : field.values) total += value;
    if (!(total > 0.0)) throw std::domain_error("jump location requested from a zero-mass field");
    const double target = u * total;
    double running = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (field.values[i] <= 0.0) continue;
        running += field.values[i];
        last_positive = i;
        if (running > target) return field.grid.x(i);
    }
    return field.grid.x(last_positive);
}

double bisect_clock_crossing(double deficit, double rate, double mass0, double tau,
                             const std::function<double(double)>& mass_after, double rel_tol) {
    double lo = 0.0;
    double hi = tau;
    while (hi - lo > rel_tol * tau) {
        const double mid = 0.5 * (lo + hi);
        const double clock = rate * mid * 0.5 * (mass0 + mass_after(mid));
        if (clock >= deficit)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

int DualPath::sign_count(double t) const {
    int count = 0;
    for (const auto& j : jumps)
        if (j.time <= t && j.mark == 2) ++count;
    return count;
}

double integrated_mass(const DualPath& path, double t) {
    if (t <= 0.0 || path.times.empty()) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 1; k < path.times.size(); ++k) {
        const double t0 = path.times[k - 1];
        const double t1 = path.times[k];
        if (t0 >= t) break;
        if (t1 <= t) {
            acc += 0.5 * (t1 - t0) * (path.masses[k - 1] + path.masses[k]);
        } else {
            const double w = (t - t0) / (t1 - t0);
            const double m = path.masses[k - 1] + w * (path.masses[k] - path.masses[k - 1]);
            acc += 0.5 * (t - t0) * (path.masses[k - 1] + m);
            break;
        }
    }
    return acc;
}

DualSimulator::DualSimulator(DriftSpec spec, DualConfig config, std::shared_ptr<const SingularProfile> profile)
    : spec_(std::move(spec)), config_(std::move(config)), profile_(std::move(profile)) {
    if (!(config_.horizon > 0.0)) throw std::invalid_argument("dual horizon must be positive");
    if (!(config_.clock_tolerance > 0.0)) throw std::invalid_argument("clock tolerance must be positive");
    std::sort(config_.snapshot_times.begin(), config_.snapshot_times.end());
    rate_ = spec_.total_rate(config_.level);
    const bool infinite_heights =
        config_.level.is_infinite() && spec_.d1() + spec_.d2() > 0.0;
    if (!profile_ && (infinite_heights || config_.level.is_infinite()))
        profile_ = std::make_shared<const SingularProfile>(very_singular_profile());
}

double DualSimulator::continuation_clock(const Field& v, StepPlan plan, double t) const {
    Field w = v;
    LogLaplaceFlow flow(config_.grid, config_.flow);
    const double dx = config_.grid.dx();
    double m_prev = mass(w.span(), dx);
    double clock = 0.0;
    while (!done(t, config_.horizon) && m_prev > 0.0) {
        auto [tau, scheme] = plan.next(config_.horizon - t);
        flow.step(w.span(), tau, scheme);
        const double m_now = mass(w.span(), dx);
        clock += rate_ * 0.5 * tau * (m_prev + m_now);
        m_prev = m_now;
        t += tau;
    }
    return clock;
}

DualPath DualSimulator::simulate(const InitialData& y0, RngStream& rng) const {
    const Grid1D& grid = config_.grid;
    const double dx = grid.dx();
    const double T = config_.horizon;

    RegMeasureState state(y0.field ? *y0.field : Field::zeros(grid));
    if (!(state.field.grid == grid)) throw std::invalid_argument("dual initial field lives on a different grid");
    for (const auto& atom : y0.atoms) apply_jump(state, atom.location, atom.mass, config_.level);
    const bool rough = absorb(state, config_.warm_start, profile_.get());
    Field& v = state.field;

    DualPath path(grid);
    path.horizon = T;
    path.rate = rate_;

    LogLaplaceFlow flow(grid, config_.flow);
    StepPlan plan(config_.flow, rough);
    std::vector<double> saved(grid.size());
    std::size_t next_snapshot = 0;
    auto take_snapshots = [&](double t) {
        while (next_snapshot < config_.snapshot_times.size() &&
               config_.snapshot_times[next_snapshot] <= t + 1e-13 * std::max(1.0, t)) {
            path.snapshots.emplace_back(config_.snapshot_times[next_snapshot], v);
            ++next_snapshot;
        }
    };

    const double inf = std::numeric_limits<double>::infinity();
    double t = 0.0;
    double m_prev = mass(v.span(), dx);
    path.times.push_back(0.0);
    path.masses.push_back(m_prev);
    take_snapshots(0.0);

    double clock_level = rate_ > 0.0 ? rng.exponential() : inf;
    double clock = 0.0;
    double censor = rate_ > 0.0 && config_.record_censoring ? continuation_clock(v, plan, t) : -1.0;

    while (!done(t, T)) {
        if (m_prev == 0.0) {
            // Numerically extinct with no pending atoms: the flow stays at zero.
            t = T;
            path.times.push_back(t);
            path.masses.push_back(0.0);
            take_snapshots(t);
            break;
        }
        double limit = T - t;
        if (next_snapshot < config_.snapshot_times.size())
            limit = std::min(limit, std::max(config_.snapshot_times[next_snapshot] - t, 0.0));
        if (limit <= 0.0) {
            take_snapshots(t);
            continue;
        }
        std::copy(v.values.begin(), v.values.end(), saved.begin());
        auto [tau, scheme] = plan.next(limit);
        flow.step(v.span(), tau, scheme, &path.stats);
        double m_now = mass(v.span(), dx);
        const double increment = rate_ * 0.5 * tau * (m_prev + m_now);

        if (clock + increment < clock_level) {
            clock += increment;
            path.integral += 0.5 * tau * (m_prev + m_now);
            t += tau;
            m_prev = m_now;
            path.times.push_back(t);
            path.masses.push_back(m_now);
            take_snapshots(t);
            continue;
        }

        // The clock fires inside this step: re-run a shorter step from the saved state.
        std::vector<double> scratch(grid.size());
        const auto mass_after = [&](double s) {
            std::copy(saved.begin(), saved.end(), scratch.begin());
            flow.step_uncached(scratch, s, scheme);
            return mass(std::span<const double>(scratch), dx);
        };
        const double s = bisect_clock_crossing(clock_level - clock, rate_, m_prev, tau, mass_after,
                                               config_.clock_tolerance);
        std::copy(saved.begin(), saved.end(), v.values.begin());
        flow.step_uncached(v.span(), s, scheme, &path.stats);
        m_now = mass(v.span(), dx);
        clock += rate_ * 0.5 * s * (m_prev + m_now);
        path.integral += 0.5 * s * (m_prev + m_now);
        t += s;
        path.times.push_back(t);
        path.masses.push_back(m_now);

        JumpRecord jump;
        jump.time = t;
        jump.clock_level = clock_level;
        jump.clock_integral = clock;
        jump.censor_level = censor;
        jump.location = sample_jump_location(rng, v);
        jump.mark = sample_jump_mark(rng, spec_, config_.level);
        jump.height = sample_jump_height(rng, jump.mark, spec_, config_.level);
        apply_jump(state, jump.location, jump.height, config_.level);
        absorb(state, config_.warm_start, profile_.get());
        path.jumps.push_back(jump);
        if (path.jumps.size() > config_.max_jumps)
            throw DualAbort(fmt::format("dual path exceeded the jump cap {} at t = {}", config_.max_jumps, t));

        plan.mark_rough();
        m_prev = mass(v.span(), dx);
        path.times.push_back(t);
        path.masses.push_back(m_prev);
        take_snapshots(t);
        clock_level = rng.exponential();
        clock = 0.0;
        if (config_.record_censoring) censor = continuation_clock(v, plan, t);
    }
    path.pending_clock = clock_level;
    path.pending_integral = clock;
    path.final_field = v;
    return path;
}

DualPath simulate_dual(const DriftSpec& spec, const DualConfig& config, const InitialData& y0, std::uint64_t seed,
                       std::uint64_t path_id) {
    RngStream rng(seed, path_id);
    return DualSimulator(spec, config).simulate(y0, rng);
}

void write_dual_jsonl(std::ostream& out, const DualPath& path, std::uint64_t seed, const TruncationLevel& level) {
    auto finite_or_null = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json header = {{"seed", seed},
                             {"level", level.label()},
                             {"horizon", path.horizon},
                             {"rate", path.rate},
                             {"jumps", path.jump_count()},
                             {"sign_count", path.sign_count()},
                             {"integral", path.integral}};
    out << header.dump() << '\n';
    for (std::size_t k = 0; k < path.jumps.size(); ++k) {
        const auto& j = path.jumps[k];
        nlohmann::json line = {{"k", k + 1},
                               {"time", j.time},
                               {"location", j.location},
                               {"height", finite_or_null(j.height)},
                               {"infinite", std::isinf(j.height)},
                               {"mark", j.mark},
                               {"clock_level", j.clock_level}};
        out << line.dump() << '\n';
    }
}

}  // namespace sbm
