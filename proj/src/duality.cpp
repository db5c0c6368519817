#include "sbmlab/duality.hpp"

#include "sbmlab/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sbm {

namespace {

constexpr std::uint64_t kCoarseOffset = std::uint64_t{1} << 40;

struct PathSample {
    std::vector<double> functionals;
    double mass = 0.0;
    std::vector<double> snapshot_mass;
    double clipped = 0.0;
};

nlohmann::json atoms_json(const std::vector<PointMass>& mu) {
    auto out = nlohmann::json::array();
    for (const auto& a : mu) out.push_back({{"location", a.location}, {"mass", a.mass}});
    return out;
}

std::vector<DualityReport> compare_deterministic(const std::string& kind, const Field& x0,
                                                 const std::vector<std::vector<PointMass>>& mus, double a_const,
                                                 double t, const SpdeParams& spde, const FlowOptions& pde,
                                                 const McParams& mc) {
    SpdeParams fine = spde;
    fine.horizon = t;
    fine.dt = 0.5 * spde.dt;
    fine.drift = DriftSpec::step(a_const, a_const);
    fine.level = TruncationLevel::infinity();
    SpdeParams coarse = fine;
    coarse.dt = spde.dt;
    const auto lf = spde_monte_carlo(x0, mus, fine, mc, 0);
    const auto lc = spde_monte_carlo(x0, mus, coarse, mc, kCoarseOffset);

    std::vector<DualityReport> out;
    for (std::size_t j = 0; j < mus.size(); ++j) {
        DualityReport r;
        r.kind = kind;
        r.t = t;
        r.mu = mus[j];
        r.lhs = lf.functionals[j].mean();
        r.lhs_stderr = lf.functionals[j].stderr_of_mean();
        r.lhs_coarse = lc.functionals[j].mean();
        r.bias_budget = std::abs(r.lhs_coarse - r.lhs);
        InitialData init;
        init.atoms = mus[j];
        const auto v = evolve_detailed(x0.grid, init, t, pde);
        r.rhs = std::exp(-inner(x0, v.field) - a_const * v.mass_integral);
        r.tolerance = 3.0 * r.lhs_stderr + r.bias_budget;
        r.pass = std::abs(r.lhs - r.rhs) <= r.tolerance;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

SpdeMcResult spde_monte_carlo(const Field& x0, const std::vector<std::vector<PointMass>>& mus, const SpdeParams& params,
                              const McParams& mc, std::uint64_t stream_offset) {
    std::vector<PathSample> samples(mc.paths);
    parallel_for(
        mc.paths,
        [&](std::size_t i) {
            RngStream rng(mc.seed, stream_offset + i);
            const auto path = simulate_spde(x0, params, rng);
            PathSample s;
            for (const auto& mu : mus) s.functionals.push_back(laplace_functional(path.final_field, mu));
            s.mass = mass(path.final_field);
            for (const auto& snap : path.snapshots) s.snapshot_mass.push_back(mass(snap.second));
            s.clipped = path.clipped_mass;
            samples[i] = std::move(s);
        },
        mc.threads);
    SpdeMcResult out;
    out.functionals.resize(mus.size());
    out.snapshot_mass.resize(params.snapshot_times.size());
    for (const auto& s : samples) {
        for (std::size_t j = 0; j < mus.size(); ++j) out.functionals[j].add(s.functionals[j]);
        out.final_mass.add(s.mass);
        for (std::size_t k = 0; k < s.snapshot_mass.size() && k < out.snapshot_mass.size(); ++k)
            out.snapshot_mass[k].add(s.snapshot_mass[k]);
        out.clipped_mass += s.clipped;
    }
    return out;
}

std::vector<DualityReport> duality_h0(const Field& x0, const std::vector<std::vector<PointMass>>& mus, double t,
                                      const SpdeParams& spde, const FlowOptions& pde, const McParams& mc) {
    return compare_deterministic("h0", x0, mus, 0.0, t, spde, pde, mc);
}

std::vector<DualityReport> duality_const_immigration(const Field& x0, const std::vector<std::vector<PointMass>>& mus,
                                                     double a_const, double t, const SpdeParams& spde,
                                                     const FlowOptions& pde, const McParams& mc) {
    if (!(a_const >= 0.0)) throw std::invalid_argument("immigration rate must be nonnegative");
    return compare_deterministic("immigration", x0, mus, a_const, t, spde, pde, mc);
}

FullDualityReport duality_full(const Field& x0, const std::vector<PointMass>& mu, double t, const SpdeParams& spde,
                               const DualConfig& dual, const std::vector<TruncationLevel>& levels,
                               const McParams& lhs_mc, const McParams& rhs_mc) {
    if (levels.empty()) throw std::invalid_argument("full duality needs at least one truncation level");
    FullDualityReport rep;
    rep.t = t;
    rep.mu = mu;

    SpdeParams lp = spde;
    lp.horizon = t;
    const auto lhs = spde_monte_carlo(x0, {mu}, lp, lhs_mc);
    rep.lhs = lhs.functionals[0].mean();
    rep.lhs_stderr = lhs.functionals[0].stderr_of_mean();

    const double a = spde.drift.a();
    InitialData y0;
    y0.atoms = mu;
    std::vector<std::vector<double>> values(levels.size(), std::vector<double>(rhs_mc.paths));
    std::shared_ptr<const SingularProfile> profile;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        DualConfig cfg = dual;
        cfg.horizon = t;
        cfg.level = levels[l];
        if (cfg.level.is_infinite() && !profile) profile = std::make_shared<const SingularProfile>(very_singular_profile());
        const DualSimulator sim(spde.drift, cfg, profile);
        std::vector<std::size_t> jumps(rhs_mc.paths);
        std::vector<int> odd(rhs_mc.paths);
        parallel_for(
            rhs_mc.paths,
            [&](std::size_t i) {
                RngStream rng(rhs_mc.seed, i);
                const auto path = sim.simulate(y0, rng);
                const double sign = path.parity() ? -1.0 : 1.0;
                values[l][i] = sign * std::exp(-inner(x0, path.final_field) - a * path.integral);
                jumps[i] = path.jump_count();
                odd[i] = path.parity();
            },
            rhs_mc.threads);
        LevelEstimate est;
        est.level = levels[l];
        std::size_t odd_count = 0;
        double jump_sum = 0.0;
        for (std::size_t i = 0; i < rhs_mc.paths; ++i) {
            est.signed_value.add(values[l][i]);
            odd_count += static_cast<std::size_t>(odd[i]);
            jump_sum += static_cast<double>(jumps[i]);
            est.max_jumps = std::max(est.max_jumps, jumps[i]);
        }
        est.odd_fraction = static_cast<double>(odd_count) / static_cast<double>(rhs_mc.paths);
        est.mean_jumps = jump_sum / static_cast<double>(rhs_mc.paths);
        const double m = est.signed_value.mean();
        est.variance_flag = m == 0.0 || est.signed_value.stderr_of_mean() / std::abs(m) > 1.0;
        rep.levels.push_back(est);
    }
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        Accumulator diff;
        for (std::size_t i = 0; i < rhs_mc.paths; ++i) diff.add(values[l][i] - values[l + 1][i]);
        rep.levels[l].cauchy_to_next = std::abs(diff.mean());
        rep.levels[l].cauchy_stderr = diff.stderr_of_mean();
    }
    rep.cauchy_decreasing = true;
    for (std::size_t l = 1; l + 1 < levels.size(); ++l)
        if (rep.levels[l].cauchy_to_next > rep.levels[l - 1].cauchy_to_next) rep.cauchy_decreasing = false;

    rep.rhs = rep.levels.back().signed_value.mean();
    rep.rhs_stderr = rep.levels.back().signed_value.stderr_of_mean();
    rep.combined_sigma = std::sqrt(rep.lhs_stderr * rep.lhs_stderr + rep.rhs_stderr * rep.rhs_stderr);
    rep.pass = std::abs(rep.lhs - rep.rhs) <= 3.0 * rep.combined_sigma;
    return rep;
}

ExtinctionReport extinction_probability(const Field& x0, double x, double t, double a_const,
                                        const SingularProfile& profile, const FlowOptions& pde,
                                        const std::vector<double>& ms) {
    if (!(t > 0.0)) throw std::invalid_argument("extinction time must be positive");
    ExtinctionReport rep;
    rep.t = t;
    rep.x = x;
    rep.a = a_const;
    Field w(x0.grid);
    add_very_singular(w, x, t, profile);
    rep.closed_form = std::exp(-inner(x0, w) - a_const * very_singular_mass_integral(t, profile));
    for (double m : ms) {
        InitialData init;
        init.atoms.push_back({x, m});
        const auto v = evolve_detailed(x0.grid, init, t, pde);
        rep.sweep.emplace_back(m, std::exp(-inner(x0, v.field) - a_const * v.mass_integral));
    }
    return rep;
}

nlohmann::json to_json(const DualityReport& r) {
    return {{"kind", r.kind},         {"t", r.t},
            {"mu", atoms_json(r.mu)}, {"lhs", r.lhs},
            {"lhs_stderr", r.lhs_stderr}, {"lhs_coarse", r.lhs_coarse},
            {"bias_budget", r.bias_budget}, {"rhs", r.rhs},
            {"rhs_stderr", r.rhs_stderr}, {"difference", r.lhs - r.rhs},
            {"tolerance", r.tolerance}, {"pass", r.pass}};
}

nlohmann::json to_json(const FullDualityReport& r) {
    auto levels = nlohmann::json::array();
    for (const auto& l : r.levels) {
        nlohmann::json row = {{"level", l.level.label()},
                              {"rhs", l.signed_value.mean()},
                              {"rhs_stderr", l.signed_value.stderr_of_mean()},
                              {"odd_fraction", l.odd_fraction},
                              {"mean_jumps", l.mean_jumps},
                              {"max_jumps", l.max_jumps},
                              {"variance_flag", l.variance_flag}};
        if (l.cauchy_to_next >= 0.0) {
            row["cauchy_to_next"] = l.cauchy_to_next;
            row["cauchy_stderr"] = l.cauchy_stderr;
        }
        levels.push_back(row);
    }
    return {{"kind", "full"},       {"t", r.t},
            {"mu", atoms_json(r.mu)}, {"lhs", r.lhs},
            {"lhs_stderr", r.lhs_stderr}, {"rhs", r.rhs},
            {"rhs_stderr", r.rhs_stderr}, {"combined_sigma", r.combined_sigma},
            {"difference", r.lhs - r.rhs}, {"levels", levels},
            {"cauchy_decreasing", r.cauchy_decreasing}, {"pass", r.pass}};
}

nlohmann::json to_json(const ExtinctionReport& r) {
    auto sweep = nlohmann::json::array();
    for (const auto& [m, v] : r.sweep) sweep.push_back({{"m", m}, {"value", v}});
    return {{"t", r.t}, {"x", r.x}, {"a", r.a}, {"closed_form", r.closed_form}, {"sweep", sweep}};
}

}  // namespace sbm
