// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion 7   run one

#include "oracles.hpp"

#include "sbmlab/branching.hpp"
#include "sbmlab/config.hpp"
#include "sbmlab/dual_process.hpp"
#include "sbmlab/duality.hpp"
#include "sbmlab/log_laplace.hpp"
#include "sbmlab/parallel.hpp"
#include "sbmlab/runner.hpp"
#include "sbmlab/singular_profile.hpp"
#include "sbmlab/spde.hpp"
#include "sbmlab/stats.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace sbm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

Field indicator(const Grid1D& g, double a, double b, double height = 1.0) {
    Field f(g);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double x = g.x(i);
        if (x >= a - 1e-9 && x <= b + 1e-9) f.values[i] = height;
    }
    return f;
}

// 1. exact reaction flow
Outcome reaction_exactness() {
    const Grid1D g(1.0, 5);
    double worst = 0.0;
    for (double v0 : {0.0, 1.0, 2.0, 10.0})
        for (double tau : {0.01, 0.1, 1.0}) {
            Field f(g, std::vector<double>(5, v0));
            const Field out = reaction_substep(f, tau);
            const double expect = v0 / (1.0 + v0 * tau / 2.0);
            for (double v : out.values) worst = std::max(worst, std::abs(v - expect));
        }
    return {worst <= 1e-12, fmt::format("max abs error {:.3e} over 12 cases", worst)};
}

// 2. heat step against the Gaussian kernel
Outcome heat_oracle() {
    const Grid1D g(10.0, 2001);
    Field v(g);
    add_grid_delta(v, 0.0, 1.0);
    const Field u = oracle::heat_flow(v, 0.5, FlowOptions{1e-3, 8}, true);
    double err = 0.0;
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double p = heat_kernel(0.5, g.x(i));
        err = std::max(err, std::abs(u[i] - p));
        peak = std::max(peak, p);
    }
    const double rel = err / peak;
    return {rel < 5e-3, fmt::format("sup error / sup p = {:.3e} (dx=0.01, L=10)", rel)};
}

// 3. comparison inequalities on a randomized suite
Outcome comparison_suite() {
    const Grid1D g(8.0, 321);
    const FlowOptions opts{1e-3, 8};
    RngStream rng(31337, 3);
    auto random_measure = [&](InitialData& d) {
        const int atoms = 1 + static_cast<int>(rng.uniform() * 3.0);
        for (int k = 0; k < atoms; ++k) d.atoms.push_back({-2.0 + 4.0 * rng.uniform(), 0.1 + 20.0 * rng.uniform()});
        if (rng.uniform() < 0.5) {
            Field f(g);
            const double amp = 5.0 * rng.uniform();
            const double c = -1.5 + 3.0 * rng.uniform();
            const double s = 0.2 + 0.8 * rng.uniform();
            for (std::size_t i = 1; i + 1 < g.size(); ++i) f.values[i] = amp * std::exp(-0.5 * std::pow((g.x(i) - c) / s, 2));
            d.field = f;
        }
    };
    int failures = 0;
    double worst_dom = -1e300, worst_sub = -1e300, worst_mono = -1e300;
    for (int c = 0; c < 20; ++c) {
        InitialData mu, eta;
        random_measure(mu);
        random_measure(eta);
        const double t = 0.05 + 0.95 * rng.uniform();
        const Field rmu = regularize(g, mu);
        const Field reta = regularize(g, eta);
        Field sum = rmu;
        for (std::size_t i = 0; i < g.size(); ++i) sum.values[i] += reta.values[i];
        const Field vmu = evolve_field(rmu, t, opts, true).field;
        const Field veta = evolve_field(reta, t, opts, true).field;
        const Field vsum = evolve_field(sum, t, opts, true).field;
        const Field smu = oracle::heat_flow(rmu, t, opts, true);
        bool ok = true;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double dom = vmu[i] - smu[i] - (1e-6 + 0.01 * smu[i]);
            const double bound = veta[i] + vmu[i];
            const double sub = vsum[i] - bound - (1e-6 + 0.01 * bound);
            // mu <= mu + eta
            const double mono = vmu[i] - vsum[i] - (1e-6 + 0.01 * vsum[i]);
            worst_dom = std::max(worst_dom, dom);
            worst_sub = std::max(worst_sub, sub);
            worst_mono = std::max(worst_mono, mono);
            if (dom > 0.0 || sub > 0.0 || mono > 0.0) ok = false;
        }
        failures += ok ? 0 : 1;
    }
    return {failures == 0, fmt::format("20 cases, {} failing; worst excess over tolerance: domination {:.2e}, "
                                       "subadditivity {:.2e}, monotonicity {:.2e}",
                                       failures, worst_dom, worst_sub, worst_mono)};
}

// 4. very singular profile and the monotone limit
Outcome profile_and_limit() {
    const auto prof = very_singular_profile(6.0, 1e-10);
    const double res = profile_residual(prof);
    double rmin = 1e300, rmax = 0.0;
    for (double xi = 4.0; xi <= 6.0 + 1e-12; xi += 0.01) {
        const double r = prof.value(xi) / (xi * std::exp(-0.5 * xi * xi));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
    }
    const double ratio_var = rmax / rmin - 1.0;

    const Grid1D g(6.0, 2401);
    const FlowOptions opts{1e-3, 8};
    const double t = 0.5;
    Field prev(g);
    bool monotone = true;
    double worst_over_w = 0.0;
    double gap = 0.0;
    double wpeak = 0.0;
    for (double n : {1.0, 4.0, 16.0, 64.0, 256.0, 1024.0}) {
        InitialData d;
        d.atoms.push_back({0.0, n});
        const Field v = evolve(g, d, t, opts);
        gap = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (v[i] + 1e-12 < prev[i]) monotone = false;
            const double w = very_singular_solution(t, g.x(i), prof);
            worst_over_w = std::max(worst_over_w, (v[i] - w) / (w + 1e-300));
            if (std::abs(g.x(i)) <= 3.0) {
                gap = std::max(gap, std::abs(w - v[i]));
                wpeak = std::max(wpeak, w);
            }
        }
        prev = v;
    }
    const double rel_gap = gap / wpeak;
    const bool ok = res < 1e-8 && ratio_var < 0.01 && monotone && worst_over_w <= 1e-3 && rel_gap < 0.02;
    return {ok, fmt::format("f(0)={:.12f} residual {:.2e}; tail ratio variation {:.3e} on [4,6]; monotone in n: {}; "
                            "max (V-W)/W {:.2e}; sup gap at n=1024 {:.3e}",
                            prof.f0(), res, ratio_var, monotone, worst_over_w, rel_gap)};
}

// 5. self-similar consistency from the warm start
Outcome self_similar() {
    const auto prof = very_singular_profile();
    const Grid1D g(6.0, 2401);
    const double t0 = 1e-3, dt = 0.25;
    Field w0(g);
    add_very_singular(w0, 0.0, t0, prof);
    const Field v = evolve_field(w0, dt, FlowOptions{1e-3, 8}, true).field;
    double err = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.x(i)) > 3.0) continue;
        const double w = very_singular_solution(t0 + dt, g.x(i), prof);
        err = std::max(err, std::abs(v[i] - w));
        peak = std::max(peak, w);
    }
    return {err / peak < 0.01, fmt::format("sup error / sup W on |x|<=3: {:.3e} (t0=1e-3, dt=0.25, dx=0.005)", err / peak)};
}

// 6. Borel-Tanner
Outcome borel_tanner() {
    const double lambda = 0.5;
    double total = 0.0;
    for (std::uint64_t k = 1; k <= 10000; ++k) total += borel_tanner_pmf(lambda, k);
    // Tail beyond 10^4: pmf decays like (lambda e^{1-lambda})^k, far below 1e-100.
    const double sum_err = std::abs(total - 1.0);
    const std::size_t n = 100000;
    std::map<std::uint64_t, std::size_t> counts;
    RngStream rng(6, 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[total_progeny_sample(rng, lambda)];
    double tv = 0.0;
    double covered = 0.0;
    std::uint64_t kmax = counts.rbegin()->first;
    for (std::uint64_t k = 1; k <= std::max<std::uint64_t>(kmax, 200); ++k) {
        const double p = borel_tanner_pmf(lambda, k);
        const auto it = counts.find(k);
        const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n);
        tv += std::abs(p - q);
        covered += p;
    }
    tv = 0.5 * (tv + (1.0 - covered));
    return {tv < 0.02 && sum_err < 1e-8, fmt::format("TV distance {:.4f} at 1e5 samples; |sum pmf - 1| = {:.2e}", tv, sum_err)};
}

// 7. coupling with the dominating branching system
Outcome coupling() {
    const Grid1D g(4.0, 801);
    DualConfig cfg{.grid = g};
    cfg.flow = FlowOptions{1e-3, 8};
    cfg.horizon = 0.2;
    cfg.level = TruncationLevel::infinity();
    const auto prof = std::make_shared<const SingularProfile>(very_singular_profile());
    const DualSimulator sim(DriftSpec::step(0.0, 1.0), cfg, prof);
    InitialData y0;
    y0.atoms.push_back({0.0, 1.0});
    const MassCurve free_flow = flow_mass_curve(g, y0, cfg.horizon, cfg.flow);
    const std::size_t paths = 1000;
    std::vector<CouplingReport> reps(paths);
    std::vector<std::size_t> jumps(paths);
    parallel_for(paths, [&](std::size_t i) {
        RngStream rng(7007, i);
        const auto path = sim.simulate(y0, rng);
        jumps[i] = path.jump_count();
        reps[i] = couple_with_branching(path, free_flow, prof->mass_coefficient(), 1e-6);
    });
    std::size_t tv = 0, mv = 0, maxj = 0;
    double worst_t = -1e300, worst_m = -1e300, mean_j = 0.0;
    for (std::size_t i = 0; i < paths; ++i) {
        tv += reps[i].time_violations;
        mv += reps[i].mass_violations;
        if (!reps[i].dual_times.empty()) worst_t = std::max(worst_t, reps[i].worst_time_margin);
        worst_m = std::max(worst_m, reps[i].worst_mass_margin);
        maxj = std::max(maxj, jumps[i]);
        mean_j += static_cast<double>(jumps[i]) / static_cast<double>(paths);
    }
    return {tv == 0 && mv == 0,
            fmt::format("1000 paths (nu_bar=1, T=0.2, level inf): R_i<=T_i violations {}, mass-domination violations {}; "
                        "worst (R-T)/T {:.2e}, worst mass margin {:.2e}; mean/max dual jumps {:.2f}/{}",
                        tv, mv, worst_t, worst_m, mean_j, maxj)};
}

// 8. time-changed jump gaps are Exp(1)
Outcome clock_law() {
    const Grid1D g(5.0, 201);
    DualConfig cfg{.grid = g};
    cfg.flow = FlowOptions{1e-3, 8};
    cfg.horizon = 0.3;
    cfg.level = TruncationLevel::finite(20.0);
    cfg.record_censoring = true;
    const DriftSpec drift(MeasureSpec({{3.0, 1.0}}), MeasureSpec({{1.0, 0.5}}), 1.0, 2.0);
    const DualSimulator sim(drift, cfg);
    InitialData y0;
    y0.atoms.push_back({0.0, 1.0});
    std::vector<double> pit;
    std::size_t batch = 0;
    while (pit.size() < 10000) {
        const std::size_t paths = 500;
        std::vector<std::vector<double>> local(paths);
        parallel_for(paths, [&](std::size_t i) {
            RngStream rng(808, batch * paths + i);
            const auto path = sim.simulate(y0, rng);
            double prev = 0.0;
            for (const auto& j : path.jumps) {
                // Gap recomputed from the stored mass trajectory.
                const double now = integrated_mass(path, j.time);
                const double gap = path.rate * (now - prev);
                prev = now;
                const double c = j.censor_level;
                local[i].push_back(std::min(1.0, -std::expm1(-gap) / -std::expm1(-c)));
            }
        });
        for (const auto& l : local) pit.insert(pit.end(), l.begin(), l.end());
        ++batch;
    }
    pit.resize(10000);
    const double d = ks_statistic(pit, [](double u) { return std::clamp(u, 0.0, 1.0); });
    const double p = ks_pvalue(d, pit.size());
    return {p > 0.01, fmt::format("10000 censoring-adjusted gaps from {} paths: KS D={:.4f}, p={:.3f}", batch * 500, d, p)};
}

// 9. mass martingale and immigration growth
Outcome mass_martingale() {
    const Grid1D g(5.0, 201);
    const Field x0 = indicator(g, -1.0, 1.0);
    SpdeParams p{.grid = g};
    p.dt = 1e-3;
    p.horizon = 0.25;
    p.snapshot_times = {0.1, 0.25};
    const McParams mc{10000, 909, 0};
    const auto r0 = spde_monte_carlo(x0, {}, p, mc);
    SpdeParams pi = p;
    pi.drift = DriftSpec::step(1.0, 1.0);
    const auto r1 = spde_monte_carlo(x0, {}, pi, mc, std::uint64_t{1} << 40);

    // Mean dynamics of the scheme: the noise step is mean preserving, so
    // E X obeys the explicit linear recursion with source h = 1.
    auto mean_mass = [&](double t) {
        const std::size_t steps = static_cast<std::size_t>(std::llround(t / p.dt));
        std::vector<double> m = x0.values, nx(m.size(), 0.0);
        const double r = 0.5 * p.dt / (g.dx() * g.dx());
        for (std::size_t s = 0; s < steps; ++s) {
            for (std::size_t i = 1; i + 1 < m.size(); ++i) nx[i] = m[i] + r * (m[i - 1] - 2 * m[i] + m[i + 1]) + p.dt;
            std::swap(m, nx);
        }
        return mass(m, g.dx());
    };
    std::string detail;
    bool ok = true;
    const double m0 = mass(x0);
    for (std::size_t k = 0; k < 2; ++k) {
        const double t = p.snapshot_times[k];
        const auto& a = r0.snapshot_mass[k];
        const bool ok0 = std::abs(a.mean() - m0) <= 3.0 * a.stderr_of_mean();
        const auto& b = r1.snapshot_mass[k];
        const double target = mean_mass(t);
        const double sine = m0 + oracle::dirichlet_source_mass(0.5 * (g.size() - 2) * g.dx(), t);
        const bool ok1 = std::abs(b.mean() - target) <= 3.0 * b.stderr_of_mean();
        ok = ok && ok0 && ok1;
        detail += fmt::format("t={}: h=0 {:.4f}+-{:.4f} vs {:.4f}; h=1 {:.4f}+-{:.4f} vs {:.4f} "
                              "(Dirichlet sine series {:.4f}, whole-line {:.4f}); ",
                              t, a.mean(), a.stderr_of_mean(), m0, b.mean(), b.stderr_of_mean(), target, sine,
                              m0 + 2.0 * g.half_extent() * t);
    }
    return {ok, detail};
}

std::string duality_detail(const std::vector<DualityReport>& reps, bool& ok) {
    std::string s;
    ok = true;
    for (const auto& r : reps) {
        ok = ok && r.pass;
        s += fmt::format("theta={}: LHS {:.4f}+-{:.4f} (coarse {:.4f}) RHS {:.4f} |diff| {:.4f} tol {:.4f}; ",
                         r.mu[0].mass, r.lhs, r.lhs_stderr, r.lhs_coarse, r.rhs, std::abs(r.lhs - r.rhs), r.tolerance);
    }
    return s;
}

std::vector<std::vector<PointMass>> thetas() { return {{{0.0, 0.5}}, {{0.0, 1.0}}, {{0.0, 2.0}}}; }

// 10. duality with zero drift
Outcome duality_zero_drift() {
    const Grid1D g(5.0, 201);
    SpdeParams sp{.grid = g};
    sp.dt = 1e-3;
    const auto reps = duality_h0(indicator(g, -1, 1), thetas(), 0.25, sp, FlowOptions{2.5e-4, 8}, McParams{10000, 1010, 0});
    bool ok;
    const auto d = duality_detail(reps, ok);
    return {ok, d};
}

// 11. duality with constant immigration
Outcome duality_immigration() {
    const Grid1D g(5.0, 201);
    SpdeParams sp{.grid = g};
    sp.dt = 1e-3;
    const auto reps = duality_const_immigration(indicator(g, -1, 1), thetas(), 1.0, 0.25, sp, FlowOptions{2.5e-4, 8},
                                                McParams{10000, 1111, 0});
    bool ok;
    const auto d = duality_detail(reps, ok);
    return {ok, d};
}

// 12. signed duality with dual jumps, drift 1{x>0}
Outcome duality_signed() {
    const Grid1D g(5.0, 201);
    SpdeParams sp{.grid = g};
    sp.dt = 2.5e-4;
    sp.drift = DriftSpec::step(0.0, 1.0);
    DualConfig dc{.grid = g};
    dc.flow = FlowOptions{2.5e-4, 8};
    std::vector<TruncationLevel> levels;
    for (double n : {5.0, 10.0, 20.0, 40.0}) levels.push_back(TruncationLevel::finite(n));
    const auto rep = duality_full(indicator(g, -1, 1), {{0.0, 1.0}}, 0.1, sp, dc, levels, McParams{10000, 1212, 0},
                                  McParams{10000, 1213, 0});
    std::string sweep;
    for (const auto& l : rep.levels)
        sweep += fmt::format("n={}: {:.5f}+-{:.5f} cauchy {:.2e}; ", l.level.label(), l.signed_value.mean(),
                             l.signed_value.stderr_of_mean(), l.cauchy_to_next);
    const bool ok = rep.pass && rep.cauchy_decreasing;
    return {ok, fmt::format("LHS {:.5f}+-{:.5f}, RHS(n=40) {:.5f}+-{:.5f}, |diff| {:.5f} vs 3 sigma {:.5f}; "
                            "Cauchy decreasing: {}; {}",
                            rep.lhs, rep.lhs_stderr, rep.rhs, rep.rhs_stderr, std::abs(rep.lhs - rep.rhs),
                            3 * rep.combined_sigma, rep.cauchy_decreasing, sweep)};
}

// 13. pathwise comparison under shared noise
Outcome comparison_coupled() {
    const Grid1D g(3.0, 61);
    SpdeParams lo{.grid = g};
    lo.dt = 1e-3;
    lo.horizon = 0.1;
    lo.scheme = NoiseScheme::FellerCoupled;
    for (int k = 1; k <= 20; ++k) lo.snapshot_times.push_back(0.005 * k);
    lo.drift = DriftSpec::step(0.5, 1.0);
    SpdeParams hi = lo;
    hi.drift = DriftSpec::step(1.0, 1.0);
    const Field x0 = indicator(g, -0.5, 0.5, 0.5);
    const std::size_t paths = 100;
    std::vector<double> worst(paths, -1e300);
    std::vector<double> slack(paths, 0.0);
    parallel_for(paths, [&](std::size_t i) {
        RngStream r1(1313, i), r2(1313, i);
        const auto a = simulate_spde(x0, lo, r1);
        const auto b = simulate_spde(x0, hi, r2);
        slack[i] = 1e-12 + a.clipped_mass + b.clipped_mass;
        for (std::size_t k = 0; k < a.snapshots.size(); ++k)
            for (std::size_t j = 0; j < g.size(); ++j)
                worst[i] = std::max(worst[i], a.snapshots[k].second[j] - b.snapshots[k].second[j]);
    });
    std::size_t violations = 0;
    double w = -1e300;
    for (std::size_t i = 0; i < paths; ++i) {
        w = std::max(w, worst[i]);
        if (worst[i] > slack[i]) ++violations;
    }
    return {violations == 0,
            fmt::format("100 coupled path pairs, h_(0.5,1) vs h_(1,1): {} violations; max(X_c - X_1) = {:.3e}", violations, w)};
}

// 14. cozero stability under doubling L
Outcome cozero_stability() {
    SpdeParams p{.grid = Grid1D(4.0, 161)};
    p.dt = 1e-3;
    p.horizon = 0.1;
    p.drift = DriftSpec::step(0.0, 1.0);
    SpdeParams pw = p;
    pw.grid = Grid1D(8.0, 321);
    const Field x0 = indicator(p.grid, -0.5, 0.5);
    const Field x0w = indicator(pw.grid, -0.5, 0.5);
    const std::size_t paths = 400;
    std::vector<double> a(paths), b(paths), c(paths);
    parallel_for(paths, [&](std::size_t i) {
        RngStream r1(1414, i), r2(1414, i), r3(1415, i);
        a[i] = cozero_measure(simulate_spde(x0, p, r1).final_field);
        b[i] = cozero_measure(simulate_spde(x0w, pw, r2).final_field);
        c[i] = cozero_measure(simulate_spde(x0w, pw, r3).final_field);
    });
    const double ma = median(a), mb = median(b), mc = median(c);
    const double shift = std::abs(mb - ma) / ma;
    const double shift_indep = std::abs(mc - ma) / ma;
    return {shift < 0.05 && shift_indep < 0.05, fmt::format("median cozero measure L=4: {:.3f}, L=8 (shared noise): {:.3f}, shift {:.2e}; "
                                      "L=8 (independent noise): {:.3f}, shift {:.3f}",
                                      ma, mb, shift, mc, shift_indep)};
}

// 15. byte-identical reruns
Outcome determinism() {
    const fs::path base = fs::temp_directory_path() / "sbmlab_acceptance_determinism";
    fs::remove_all(base);
    bool ok = true;
    std::size_t compared = 0;
    for (const std::string preset : {"spde-mass", "dual-h01", "branching-small", "h0-smoke"}) {
        std::vector<fs::path> dirs;
        for (unsigned threads : {1u, 3u, 1u}) {
            RunOptions o;
            o.subcommand = preset == "spde-mass" ? "spde" : preset == "dual-h01" ? "dual" : preset == "h0-smoke" ? "duality" : "branching";
            o.preset = preset;
            o.paths = preset == "h0-smoke" ? 200 : 60;
            o.threads = threads;
            o.out_dir = base / fmt::format("run{}", dirs.size());
            const auto r = run(o);
            if (r.exit_code != 0) return {false, fmt::format("{} failed: {}", preset, r.message)};
            dirs.push_back(r.run_dir);
        }
        for (const auto& entry : fs::directory_iterator(dirs[0])) {
            auto slurp = [](const fs::path& f) {
                std::ifstream in(f, std::ios::binary);
                std::stringstream ss;
                ss << in.rdbuf();
                return ss.str();
            };
            const std::string ref = slurp(entry.path());
            for (std::size_t k = 1; k < dirs.size(); ++k) {
                ++compared;
                if (slurp(dirs[k] / entry.path().filename()) != ref) ok = false;
            }
        }
    }
    fs::remove_all(base);
    return {ok, fmt::format("{} file comparisons across 4 presets, threads 1/3/1: {}", compared,
                            ok ? "all byte-identical" : "MISMATCH")};
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*fn)();
};

const Criterion kCriteria[] = {
    {1, "reaction flow exactness", reaction_exactness},
    {2, "heat step vs Gaussian kernel", heat_oracle},
    {3, "PDE comparison inequalities", comparison_suite},
    {4, "very singular profile and monotone limit", profile_and_limit},
    {5, "self-similar consistency", self_similar},
    {6, "Borel-Tanner total progeny", borel_tanner},
    {7, "dual/branching coupling", coupling},
    {8, "jump clock law (KS)", clock_law},
    {9, "SPDE mass martingale and immigration growth", mass_martingale},
    {10, "duality, zero drift", duality_zero_drift},
    {11, "duality, constant immigration", duality_immigration},
    {12, "signed duality with level sweep", duality_signed},
    {13, "comparison under coupled noise", comparison_coupled},
    {14, "cozero-set stability", cozero_stability},
    {15, "determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    int failed = 0;
    for (const auto& c : kCriteria) {
        if (only && c.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = {false, fmt::format("exception: {}", e.what())};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        fmt::print("[{}] C{:02d} {} | {} ({:.1f} s)\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail, secs);
        std::fflush(stdout);
        failed += out.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
