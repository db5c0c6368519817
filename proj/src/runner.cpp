#include "sbmlab/runner.hpp"

#include "sbmlab/branching.hpp"
#include "sbmlab/config.hpp"
#include "sbmlab/dual_process.hpp"
#include "sbmlab/duality.hpp"
#include "sbmlab/parallel.hpp"
#include "sbmlab/scalar_sde.hpp"
#include "sbmlab/singular_profile.hpp"
#include "sbmlab/spde.hpp"
#include "sbmlab/stats.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>

namespace sbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
    Config config;
    std::string subcommand;
    std::uint64_t seed = 1;
    std::size_t paths = 1;
    unsigned threads = 0;
    fs::path dir;
    std::string hash_hex;

    std::ofstream open(const std::string& name) const {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
        return out;
    }
    std::ofstream csv(const std::string& name) const {
        auto out = open(name);
        out << fmt::format("# config_hash={} seed={} subcommand={}\n", hash_hex, seed, subcommand);
        return out;
    }
    void write_json(const std::string& name, json j) const {
        j["config_hash"] = hash_hex;
        j["seed"] = seed;
        open(name) << j.dump(2) << '\n';
    }
};

std::string g17(double x) { return fmt::format("{:.17g}", x); }

// ---- pde -------------------------------------------------------------------

void run_pde(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    const FlowOptions flow = flow_from(c);
    const double t = c.get<double>("pde.t");
    if (!(t > 0.0)) throw SchemaError("pde.t", "must be positive");
    const auto atoms = atoms_from(c, "mu");
    const double eps = c.get_or<double>("pde.warm_start", 1e-3);

    std::shared_ptr<SingularProfile> profile;
    Field v(grid);
    bool any_infinite = false;
    bool rough = false;
    for (const auto& a : atoms) {
        if (std::isinf(a.mass)) {
            any_infinite = true;
        } else {
            add_grid_delta(v, a.location, a.mass);
            rough = true;
        }
    }
    double t_run = t;
    if (any_infinite || c.get_or<bool>("pde.profile_csv", false))
        profile = std::make_shared<SingularProfile>(very_singular_profile(c.get_or<double>("pde.xi_max", 6.0)));
    if (any_infinite) {
        if (!(t > eps)) throw SchemaError("pde.t", "must exceed pde.warm_start for infinite atoms");
        for (const auto& a : atoms)
            if (std::isinf(a.mass)) add_very_singular(v, a.location, eps, *profile);
        t_run = t - eps;
        rough = true;
    }
    const bool curve = c.get_or<bool>("pde.curve", false);
    const auto result = evolve_field(v, t_run, flow, rough, curve);

    auto field_out = ctx.csv("field.csv");
    field_out << "x,V\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        field_out << g17(grid.x(i)) << ',' << g17(result.field.values[i]) << '\n';
    if (curve) {
        auto curve_out = ctx.csv("mass_curve.csv");
        curve_out << "t,mass\n";
        const double shift = t - t_run;
        for (std::size_t k = 0; k < result.times.size(); ++k)
            curve_out << g17(result.times[k] + shift) << ',' << g17(result.masses[k]) << '\n';
    }
    if (profile && c.get_or<bool>("pde.profile_csv", false)) {
        auto out = ctx.csv("profile.csv");
        write_profile_csv(out, *profile);
    }
    json summary = {{"t", t},
                    {"mass", mass(result.field)},
                    {"mass_integral", result.mass_integral},
                    {"leaked_mass", result.stats.leaked_mass},
                    {"clipped_mass", result.stats.clipped_mass}};
    if (any_infinite) {
        summary["warm_start"] = eps;
        summary["profile_f0"] = profile->f0();
        summary["profile_tail_constant"] = profile->tail_constant;
        summary["singular_mass_closed_form"] = very_singular_mass(t, *profile);
    }
    ctx.write_json("summary.json", summary);
}

// ---- dual ------------------------------------------------------------------

DualConfig dual_config_from(const Config& c, const Grid1D& grid) {
    DualConfig cfg{.grid = grid};
    cfg.flow = flow_from(c);
    cfg.horizon = c.get_or<double>("dual.horizon", 0.1);
    cfg.level = level_from(c, "dual.level");
    cfg.warm_start = c.get_or<double>("dual.warm_start", 1e-3);
    cfg.snapshot_times = c.get_or<std::vector<double>>("dual.snapshots", {});
    cfg.clock_tolerance = c.get_or<double>("dual.clock_tolerance", 1e-6);
    cfg.max_jumps = c.get_or<std::size_t>("dual.max_jumps", 1'000'000);
    if (!(cfg.horizon > 0.0)) throw SchemaError("dual.horizon", "must be positive");
    if (!(cfg.warm_start > 0.0)) throw SchemaError("dual.warm_start", "must be positive");
    return cfg;
}

void run_dual(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    const DriftSpec drift = drift_from(c);
    const DualConfig cfg = dual_config_from(c, grid);
    InitialData y0;
    y0.atoms = atoms_from(c, "mu");
    const DualSimulator sim(drift, cfg);

    std::vector<DualPath> paths;
    paths.reserve(ctx.paths);
    for (std::size_t i = 0; i < ctx.paths; ++i) paths.emplace_back(grid);
    parallel_for(
        ctx.paths,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, i);
            paths[i] = sim.simulate(y0, rng);
        },
        ctx.threads);

    auto jsonl = ctx.open("paths.jsonl");
    Accumulator jumps;
    Accumulator integral;
    std::size_t odd = 0;
    std::size_t max_jumps = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        jsonl << json({{"path", i}}).dump() << '\n';
        write_dual_jsonl(jsonl, paths[i], ctx.seed, cfg.level);
        jumps.add(static_cast<double>(paths[i].jump_count()));
        integral.add(paths[i].integral);
        odd += static_cast<std::size_t>(paths[i].parity());
        max_jumps = std::max(max_jumps, paths[i].jump_count());
    }
    if (!paths.empty()) {
        auto snaps = ctx.csv("snapshots_path0.csv");
        snaps << "t,x,value\n";
        for (const auto& [t, f] : paths[0].snapshots)
            for (std::size_t i = 0; i < grid.size(); ++i) snaps << g17(t) << ',' << g17(grid.x(i)) << ',' << g17(f[i]) << '\n';
    }
    ctx.write_json("summary.json", {{"level", cfg.level.label()},
                                    {"horizon", cfg.horizon},
                                    {"rate", sim.rate()},
                                    {"paths", ctx.paths},
                                    {"mean_jumps", jumps.mean()},
                                    {"mean_jumps_stderr", jumps.stderr_of_mean()},
                                    {"max_jumps", max_jumps},
                                    {"odd_fraction", static_cast<double>(odd) / static_cast<double>(ctx.paths)},
                                    {"mean_integral", integral.mean()}});
}

// ---- branching -------------------------------------------------------------

void run_branching(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    const FlowOptions flow = flow_from(c);
    InitialData y0;
    y0.atoms = atoms_from(c, "mu");
    BranchingParams bp;
    bp.horizon = c.get<double>("branching.horizon");
    bp.nu_bar = c.get<double>("branching.nu_bar");
    bp.population_cap = c.get_or<std::size_t>("branching.population_cap", bp.population_cap);
    const auto profile = std::make_shared<const SingularProfile>(very_singular_profile());
    bp.mass_coefficient = profile->mass_coefficient();
    const MassCurve root = flow_mass_curve(grid, y0, bp.horizon, flow);
    const double lambda = branching_lambda(root, bp);

    std::vector<BranchingRecord> recs(ctx.paths);
    parallel_for(
        ctx.paths,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, i);
            recs[i] = simulate_branching(root, bp, rng);
        },
        ctx.threads);
    auto out = ctx.csv("branching.csv");
    out << "run,alive,capped,generations\n";
    Accumulator alive;
    std::vector<Accumulator> gens;
    std::size_t capped = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto counts = recs[i].generation_counts(bp.horizon);
        std::string g;
        for (std::size_t k = 0; k < counts.size(); ++k) g += (k ? ";" : "") + std::to_string(counts[k]);
        out << i << ',' << recs[i].alive(bp.horizon) << ',' << (recs[i].capped ? 1 : 0) << ',' << g << '\n';
        alive.add(static_cast<double>(recs[i].alive(bp.horizon)));
        capped += recs[i].capped ? 1 : 0;
        gens.resize(std::max(gens.size(), counts.size()));
    }
    for (const auto& r : recs) {
        const auto counts = r.generation_counts(bp.horizon);
        for (std::size_t k = 0; k < gens.size(); ++k) gens[k].add(k < counts.size() ? static_cast<double>(counts[k]) : 0.0);
    }
    json gen_means = json::array();
    for (const auto& gacc : gens) gen_means.push_back(gacc.mean());
    json summary = {{"horizon", bp.horizon},     {"nu_bar", bp.nu_bar},
                    {"lambda", lambda},          {"mean_alive", alive.mean()},
                    {"mean_alive_stderr", alive.stderr_of_mean()},
                    {"capped_runs", capped},     {"generation_means", gen_means},
                    {"singular_mass_integral", very_singular_mass_integral(bp.horizon, *profile)}};

    if (c.get_or<bool>("branching.couple", false)) {
        const DriftSpec drift = drift_from(c);
        DualConfig cfg = dual_config_from(c, grid);
        cfg.horizon = bp.horizon;
        const DualSimulator sim(drift, cfg, profile);
        if (std::abs(sim.rate() - bp.nu_bar) > 1e-12 * std::max(1.0, bp.nu_bar))
            throw SchemaError("branching.nu_bar", fmt::format("must equal the dual jump rate {}", sim.rate()));
        const MassCurve free_flow = flow_mass_curve(grid, y0, bp.horizon, cfg.flow);
        std::vector<CouplingReport> reps(ctx.paths);
        parallel_for(
            ctx.paths,
            [&](std::size_t i) {
                RngStream rng(ctx.seed, i);
                const auto path = sim.simulate(y0, rng);
                reps[i] = couple_with_branching(path, free_flow, bp.mass_coefficient);
            },
            ctx.threads);
        auto couple_out = ctx.csv("coupling.csv");
        couple_out << "run,dual_jumps,hat_events,time_violations,mass_violations,worst_time_margin,worst_mass_margin\n";
        std::size_t tv = 0;
        std::size_t mv = 0;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const auto& r = reps[i];
            couple_out << i << ',' << r.dual_times.size() << ',' << r.hat_times.size() << ',' << r.time_violations << ','
                 << r.mass_violations << ',' << g17(r.worst_time_margin) << ',' << g17(r.worst_mass_margin) << '\n';
            tv += r.time_violations;
            mv += r.mass_violations;
        }
        summary["coupling"] = {{"time_violations", tv}, {"mass_violations", mv}, {"paths", ctx.paths}};
    }
    ctx.write_json("summary.json", summary);
}

// ---- spde ------------------------------------------------------------------

SpdeParams spde_params_from(const Config& c, const Grid1D& grid) {
    SpdeParams p{.grid = grid};
    p.dt = c.get<double>("spde.dt");
    p.horizon = c.get_or<double>("spde.horizon", p.horizon);
    p.drift = c.has("drift") ? drift_from(c) : DriftSpec::zero();
    p.level = level_from(c, "spde.level");
    p.scheme = parse_noise_scheme(c.get_or<std::string>("spde.scheme", "feller"));
    p.noise_scale = c.get_or<double>("spde.noise_scale", 1.0);
    p.zero_threshold = c.get_or<double>("spde.zero_threshold", 0.0);
    p.snapshot_times = c.get_or<std::vector<double>>("spde.snapshots", {});
    try {
        validate(p);
    } catch (const std::invalid_argument& e) {
        throw SchemaError("spde.dt", e.what());
    }
    return p;
}

void run_spde(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    SpdeParams p = spde_params_from(c, grid);
    const Field x0 = field_from(c, "initial", grid);
    if (p.snapshot_times.empty()) p.snapshot_times = {p.horizon};

    struct Row {
        std::vector<double> masses;
        std::vector<double> ctem;
        double clipped = 0.0;
        double min_before = 0.0;
    };
    std::vector<Row> rows(ctx.paths);
    std::vector<std::pair<double, Field>> first_snaps;
    const double lam = c.get_or<double>("spde.ctem_lambda", -1.0);
    parallel_for(
        ctx.paths,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, i);
            auto path = simulate_spde(x0, p, rng);
            Row r;
            for (const auto& [t, f] : path.snapshots) {
                r.masses.push_back(mass(f));
                r.ctem.push_back(ctem_norm(f, lam));
            }
            r.clipped = path.clipped_mass;
            r.min_before = path.min_before_clip;
            rows[i] = std::move(r);
            if (i == 0) first_snaps = std::move(path.snapshots);
        },
        ctx.threads);

    auto out = ctx.csv("masses.csv");
    out << "path";
    for (double t : p.snapshot_times) out << ",mass_t" << g17(t);
    out << '\n';
    std::vector<Accumulator> acc(p.snapshot_times.size());
    Accumulator ctem_acc;
    double clipped = 0.0;
    double min_before = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << i;
        for (std::size_t k = 0; k < rows[i].masses.size(); ++k) {
            out << ',' << g17(rows[i].masses[k]);
            acc[k].add(rows[i].masses[k]);
        }
        out << '\n';
        if (!rows[i].ctem.empty()) ctem_acc.add(rows[i].ctem.back());
        clipped += rows[i].clipped;
        min_before = std::min(min_before, rows[i].min_before);
    }
    auto snaps = ctx.csv("snapshots_path0.csv");
    snaps << "t,x,value\n";
    for (const auto& [t, f] : first_snaps)
        for (std::size_t i = 0; i < grid.size(); ++i) snaps << g17(t) << ',' << g17(grid.x(i)) << ',' << g17(f[i]) << '\n';
    json means = json::array();
    for (std::size_t k = 0; k < acc.size(); ++k)
        means.push_back({{"t", p.snapshot_times[k]}, {"mean_mass", acc[k].mean()}, {"stderr", acc[k].stderr_of_mean()}});
    ctx.write_json("diagnostics.json", {{"scheme", to_string(p.scheme)},
                                        {"initial_mass", mass(x0)},
                                        {"mass", means},
                                        {"mean_ctem_norm_final", ctem_acc.mean()},
                                        {"ctem_lambda", lam},
                                        {"clipped_mass_total", clipped},
                                        {"min_before_clip", min_before}});
}

// ---- sde -------------------------------------------------------------------

void run_sde(const Context& ctx) {
    const Config& c = ctx.config;
    const DriftSpec drift = drift_from(c);
    const double x0 = c.get<double>("sde.x0");
    const double dt = c.get<double>("sde.dt");
    const double T = c.get<double>("sde.horizon");
    const auto policies = c.get_or<std::vector<std::string>>("sde.policies", {"strict"});
    const auto eps_list = c.get_or<std::vector<double>>("sde.eps", {0.0});

    std::vector<double> exact(ctx.paths);
    std::vector<std::vector<double>> exact_occ(ctx.paths);
    parallel_for(
        ctx.paths,
        [&](std::size_t i) {
            RngStream rng(ctx.seed, (std::uint64_t{1} << 32) + i);
            const auto path = sample_half_squared_bm(dt, T, rng);
            exact[i] = path.values.back();
            for (double e : eps_list) exact_occ[i].push_back(occupation_time_at_zero(path, e));
        },
        ctx.threads);

    auto out = ctx.csv("summary.csv");
    out << "label,policy,mean_xT,stderr_xT,ks_vs_half_bm_squared";
    for (double e : eps_list) out << ",occupation_eps" << g17(e);
    out << '\n';
    const std::string label = fmt::format("b0={};b1={}", drift.b0(), drift.b1());
    auto emit = [&](const std::string& policy, const std::vector<double>& finals,
                    const std::vector<std::vector<double>>& occ) {
        Accumulator a;
        for (double v : finals) a.add(v);
        out << label << ',' << policy << ',' << g17(a.mean()) << ',' << g17(a.stderr_of_mean()) << ','
            << g17(ks_two_sample(finals, exact));
        for (std::size_t k = 0; k < eps_list.size(); ++k) {
            Accumulator o;
            for (const auto& row : occ) o.add(row[k]);
            out << ',' << g17(o.mean());
        }
        out << '\n';
    };
    emit("exact_half_bm_squared", exact, exact_occ);
    for (const auto& name : policies) {
        const ZeroPolicy policy = parse_zero_policy(name);
        std::vector<double> finals(ctx.paths);
        std::vector<std::vector<double>> occ(ctx.paths);
        parallel_for(
            ctx.paths,
            [&](std::size_t i) {
                RngStream rng(ctx.seed, i);
                const auto path = simulate_sde(drift, x0, dt, T, rng, policy);
                finals[i] = path.values.back();
                for (double e : eps_list) occ[i].push_back(occupation_time_at_zero(path, e));
                if (i == 0) {
                    auto dump = ctx.csv(fmt::format("path0_{}.csv", name));
                    write_sde_csv(dump, path);
                }
            },
            ctx.threads);
        emit(name, finals, occ);
    }
}

// ---- duality ---------------------------------------------------------------

std::vector<std::vector<PointMass>> theta_measures(const Config& c) {
    std::vector<std::vector<PointMass>> mus;
    const double x = c.get_or<double>("duality.x", 0.0);
    for (double th : c.get<std::vector<double>>("duality.thetas")) mus.push_back({{x, th}});
    return mus;
}

void run_duality(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    const FlowOptions flow = flow_from(c);
    const std::string mode = c.get<std::string>("duality.mode");
    const double t = c.get<double>("duality.t");
    const Field x0 = field_from(c, "initial", grid);
    McParams mc{ctx.paths, ctx.seed, ctx.threads};

    if (mode == "h0" || mode == "immigration") {
        SpdeParams sp{.grid = grid};
        sp.dt = c.get<double>("spde.dt");
        sp.scheme = parse_noise_scheme(c.get_or<std::string>("spde.scheme", "feller"));
        sp.horizon = t;
        try {
            validate(sp);
        } catch (const std::invalid_argument& e) {
            throw SchemaError("spde.dt", e.what());
        }
        const auto mus = theta_measures(c);
        const auto reports = mode == "h0" ? duality_h0(x0, mus, t, sp, flow, mc)
                                          : duality_const_immigration(x0, mus, c.get<double>("duality.a"), t, sp,
                                                                      flow, mc);
        json list = json::array();
        bool all = true;
        for (const auto& r : reports) {
            list.push_back(to_json(r));
            all = all && r.pass;
        }
        ctx.write_json("report.json", {{"mode", mode}, {"paths", ctx.paths}, {"reports", list}, {"pass", all}});
        return;
    }
    if (mode == "full") {
        SpdeParams sp = spde_params_from(c, grid);
        sp.horizon = t;
        DualConfig dc = dual_config_from(c, grid);
        std::vector<TruncationLevel> levels;
        for (double n : c.get<std::vector<double>>("duality.levels")) levels.push_back(TruncationLevel::finite(n));
        McParams rhs{c.get_or<std::size_t>("duality.rhs_paths", ctx.paths), ctx.seed ^ 0x5eedULL, ctx.threads};
        const auto rep = duality_full(x0, atoms_from(c, "mu"), t, sp, dc, levels, mc, rhs);
        auto sweep = ctx.csv("level_sweep.csv");
        sweep << "level,rhs,rhs_stderr,odd_fraction,mean_jumps,cauchy_to_next,cauchy_stderr\n";
        for (const auto& l : rep.levels)
            sweep << l.level.label() << ',' << g17(l.signed_value.mean()) << ',' << g17(l.signed_value.stderr_of_mean())
                  << ',' << g17(l.odd_fraction) << ',' << g17(l.mean_jumps) << ',' << g17(l.cauchy_to_next) << ','
                  << g17(l.cauchy_stderr) << '\n';
        ctx.write_json("report.json", to_json(rep));
        return;
    }
    if (mode == "extinction") {
        const auto profile = very_singular_profile();
        const auto rep = extinction_probability(x0, c.get_or<double>("duality.x", 0.0), t,
                                                c.get_or<double>("duality.a", 0.0), profile, flow);
        ctx.write_json("report.json", to_json(rep));
        return;
    }
    throw SchemaError("duality.mode", fmt::format("unknown mode '{}' (h0, immigration, full, extinction)", mode));
}

// ---- cozero ----------------------------------------------------------------

void run_cozero(const Context& ctx) {
    const Config& c = ctx.config;
    const Grid1D grid = grid_from(c);
    const double t = c.get<double>("cozero.t");
    const double eps = c.get_or<double>("cozero.eps", 0.0);
    SpdeParams p = spde_params_from(c, grid);
    p.horizon = t;
    p.snapshot_times.clear();
    // Doubling L at fixed dx.
    const Grid1D wide(2.0 * grid.half_extent(), 2 * (grid.size() - 1) + 1);
    SpdeParams pw = p;
    pw.grid = wide;
    const Field x0 = field_from(c, "initial", grid);
    const Field x0w = field_from(c, "initial", wide);
    std::vector<double> narrow(ctx.paths);
    std::vector<double> wider(ctx.paths);
    std::vector<double> wider_indep(ctx.paths);
    // Same stream for L and 2L: the Feller step draws nothing at zero nodes, so
    // the paired paths agree until the support feels the boundary. The
    // independent run gives the distributional check.
    parallel_for(
        ctx.paths,
        [&](std::size_t i) {
            RngStream r1(ctx.seed, i);
            narrow[i] = cozero_measure(simulate_spde(x0, p, r1).final_field, eps);
            RngStream r2(ctx.seed, i);
            wider[i] = cozero_measure(simulate_spde(x0w, pw, r2).final_field, eps);
            RngStream r3(ctx.seed, (std::uint64_t{1} << 32) + i);
            wider_indep[i] = cozero_measure(simulate_spde(x0w, pw, r3).final_field, eps);
        },
        ctx.threads);
    auto out = ctx.csv("cozero.csv");
    out << "path,cozero_L,cozero_2L,cozero_2L_independent\n";
    for (std::size_t i = 0; i < ctx.paths; ++i)
        out << i << ',' << g17(narrow[i]) << ',' << g17(wider[i]) << ',' << g17(wider_indep[i]) << '\n';
    auto rel_shift = [](double a, double b) { return a > 0.0 ? std::abs(b - a) / a : (b == 0.0 ? 0.0 : 1.0); };
    const double m1 = median(narrow);
    const double m2 = median(wider);
    const double m3 = median(wider_indep);
    const double shift = rel_shift(m1, m2);
    const double shift_indep = rel_shift(m1, m3);
    ctx.write_json("summary.json", {{"t", t},
                                    {"L", grid.half_extent()},
                                    {"median_L", m1},
                                    {"median_2L", m2},
                                    {"median_2L_independent", m3},
                                    {"relative_median_shift", shift},
                                    {"relative_median_shift_independent", shift_indep},
                                    {"stable", shift < 0.05 && shift_indep < 0.05}});
}

Config resolve(const RunOptions& o) {
    Config c;
    if (o.config_path && o.preset) throw SchemaError("--config", "give either --config or --preset, not both");
    if (o.config_path)
        c = Config::from_file(*o.config_path);
    else if (o.preset)
        c = Config::preset(*o.preset);
    else
        throw SchemaError("--config", "no config file or preset given");
    for (const auto& ov : o.overrides) c.apply_override(ov);
    if (o.seed) c.set("seed", YAML::Node(*o.seed));
    if (o.paths) c.set("paths", YAML::Node(*o.paths));
    return c;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"pde", "dual", "branching", "spde", "sde", "duality", "cozero"};
    return names;
}

RunResult run(const RunOptions& options) {
    RunResult result;
    Context ctx;
    try {
        ctx.subcommand = options.subcommand;
        if (std::find(subcommands().begin(), subcommands().end(), ctx.subcommand) == subcommands().end())
            throw SchemaError("<subcommand>", fmt::format("unknown subcommand '{}'", ctx.subcommand));
        ctx.config = resolve(options);
        ctx.seed = ctx.config.get_or<std::uint64_t>("seed", 1);
        ctx.paths = ctx.config.get_or<std::size_t>("paths", 1);
        if (ctx.paths == 0) throw SchemaError("paths", "must be positive");
        ctx.threads = options.threads ? options.threads : static_cast<unsigned>(ctx.config.get_or<int>("threads", 0));
        ctx.hash_hex = fmt::format("{:016x}", ctx.config.hash());
        ctx.dir = options.out_dir / fmt::format("{}-{}-s{}", ctx.subcommand, ctx.hash_hex, ctx.seed);
        fs::create_directories(ctx.dir);
        result.run_dir = ctx.dir;
        ctx.open("config.yaml") << ctx.config.canonical() << '\n';

        if (ctx.subcommand == "pde") run_pde(ctx);
        else if (ctx.subcommand == "dual") run_dual(ctx);
        else if (ctx.subcommand == "branching") run_branching(ctx);
        else if (ctx.subcommand == "spde") run_spde(ctx);
        else if (ctx.subcommand == "sde") run_sde(ctx);
        else if (ctx.subcommand == "duality") run_duality(ctx);
        else run_cozero(ctx);
        result.message = fmt::format("wrote {}", ctx.dir.string());
    } catch (const SchemaError& e) {
        result.exit_code = kExitSchema;
        result.message = fmt::format("schema error: {}", e.what());
    } catch (const std::invalid_argument& e) {
        result.exit_code = kExitSchema;
        result.message = fmt::format("invalid configuration: {}", e.what());
    } catch (const std::exception& e) {
        result.exit_code = kExitNumerical;
        result.message = fmt::format("numerical abort: {}", e.what());
        try {
            const fs::path where = ctx.dir.empty() ? options.out_dir : ctx.dir;
            fs::create_directories(where);
            std::ofstream diag(where / "diagnostics_abort.json");
            diag << json({{"subcommand", options.subcommand}, {"error", e.what()}, {"config_hash", ctx.hash_hex}})
                        .dump(2)
                 << '\n';
        } catch (...) {
        }
    }
    return result;
}

}  // namespace sbm
