#include "sbmlab/branching.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sbm {

MassCurve::MassCurve(std::vector<double> times, std::vector<double> masses)
    : times_(std::move(times)), masses_(std::move(masses)) {
    if (times_.size() != masses_.size() || times_.empty())
        throw std::invalid_argument("mass curve needs matching, nonempty time and mass arrays");
    cumulative_.assign(times_.size(), 0.0);
    for (std::size_t k = 1; k < times_.size(); ++k) {
        const double w = times_[k] - times_[k - 1];
        if (w < 0.0) throw std::invalid_argument("mass curve times must be nondecreasing");
        cumulative_[k] = cumulative_[k - 1] + 0.5 * w * (masses_[k - 1] + masses_[k]);
    }
}

double MassCurve::value(double t) const {
    if (t <= times_.front()) return masses_.front();
    if (t >= times_.back()) return masses_.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
    const double t0 = times_[k - 1];
    const double t1 = times_[k];
    const double w = (t - t0) / (t1 - t0);
    return masses_[k - 1] + w * (masses_[k] - masses_[k - 1]);
}

double MassCurve::integral(double t) const {
    if (t <= times_.front()) return 0.0;
    if (t >= times_.back()) return cumulative_.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin());
    const double t0 = times_[k - 1];
    return cumulative_[k - 1] + 0.5 * (t - t0) * (masses_[k - 1] + value(t));
}

double MassCurve::inverse_integral(double target) const {
    if (target <= 0.0) return times_.front();
    if (target > cumulative_.back()) return std::numeric_limits<double>::infinity();
    const auto k = static_cast<std::size_t>(
        std::lower_bound(cumulative_.begin(), cumulative_.end(), target) - cumulative_.begin());
    // Within [t0, t1] the integral is quadratic: c0 + m0 s + (m1 - m0) s^2 / (2w).
    const double t0 = times_[k - 1];
    const double w = times_[k] - t0;
    const double m0 = masses_[k - 1];
    const double slope = (masses_[k] - m0) / w;
    const double need = target - cumulative_[k - 1];
    double s;
    if (std::abs(slope) * w < 1e-14 * std::max(m0, 1e-300))
        s = need / m0;
    else
        s = 2.0 * need / (m0 + std::sqrt(std::max(m0 * m0 + 2.0 * slope * need, 0.0)));
    return std::min(t0 + s, times_[k]);
}

MassCurve flow_mass_curve(const Grid1D& grid, const InitialData& init, double horizon, const FlowOptions& options) {
    auto result = evolve_detailed(grid, init, horizon, options, true);
    return MassCurve(std::move(result.times), std::move(result.masses));
}

std::size_t BranchingRecord::alive(double t) const {
    return static_cast<std::size_t>(
        std::count_if(particles.begin(), particles.end(), [t](const Particle& p) { return p.birth_time <= t; }));
}

std::vector<std::size_t> BranchingRecord::generation_counts(double t) const {
    std::vector<std::size_t> counts;
    for (const auto& p : particles) {
        if (p.birth_time > t) continue;
        if (counts.size() <= static_cast<std::size_t>(p.generation)) counts.resize(p.generation + 1, 0);
        ++counts[p.generation];
    }
    return counts;
}

std::vector<std::uint32_t> BranchingRecord::label(std::size_t index) const {
    std::vector<std::uint32_t> out;
    for (auto i = static_cast<std::int64_t>(index); i > 0; i = particles[i].parent) out.push_back(particles[i].ordinal);
    out.push_back(1);
    std::reverse(out.begin(), out.end());
    return out;
}

BranchingRecord simulate_branching(const MassCurve& root_curve, const BranchingParams& params, RngStream& rng) {
    if (!(params.horizon > 0.0)) throw std::invalid_argument("branching horizon must be positive");
    if (!(params.nu_bar >= 0.0)) throw std::invalid_argument("branching intensity must be nonnegative");
    BranchingRecord rec;
    rec.horizon = params.horizon;
    rec.particles.push_back({});
    if (params.nu_bar == 0.0) return rec;
    const double T = params.horizon;
    const double c = 2.0 * params.nu_bar * params.mass_coefficient;

    for (std::size_t idx = 0; idx < rec.particles.size(); ++idx) {
        const Particle parent = rec.particles[idx];
        std::uint32_t ordinal = 0;
        double level = 0.0;
        while (true) {
            level += rng.exponential();
            double birth;
            if (idx == 0) {
                birth = root_curve.inverse_integral(level / params.nu_bar);
            } else {
                // cumulative intensity c sqrt(s - tau)
                const double d = level / c;
                birth = parent.birth_time + d * d;
            }
            if (!(birth <= T)) break;
            if (rec.particles.size() >= params.population_cap) {
                rec.capped = true;
                return rec;
            }
            rec.particles.push_back({static_cast<std::int64_t>(idx), parent.generation + 1, ++ordinal, birth});
        }
    }
    return rec;
}

double branching_lambda(const MassCurve& root_curve, const BranchingParams& params) {
    return params.nu_bar *
           (2.0 * params.mass_coefficient * std::sqrt(params.horizon) + root_curve.integral(params.horizon));
}

double borel_tanner_pmf(double lambda, std::uint64_t k) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::domain_error(fmt::format("Borel-Tanner parameter must lie in (0, 1], got {}", lambda));
    if (k == 0) throw std::domain_error("Borel-Tanner support starts at k = 1");
    const double kk = static_cast<double>(k);
    return std::exp(-lambda * kk + (kk - 1.0) * std::log(lambda * kk) - std::lgamma(kk + 1.0));
}

std::uint64_t total_progeny_sample(RngStream& rng, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::domain_error(fmt::format("subcritical Galton-Watson needs 0 < lambda < 1, got {}", lambda));
    std::uint64_t pending = 1;
    std::uint64_t total = 0;
    while (pending > 0) {
        --pending;
        ++total;
        pending += rng.poisson(lambda);
    }
    return total;
}

CouplingReport couple_with_branching(const DualPath& path, const MassCurve& free_flow, double mass_coefficient,
                                     double rel_slack) {
    CouplingReport rep;
    const double T = path.horizon;
    const double rate = path.rate;
    for (const auto& j : path.jumps) rep.dual_times.push_back(j.time);
    if (rate <= 0.0) return rep;

    // Base curve: the dual's own trajectory up to its first jump, then the jump-free flow.
    std::vector<double> bt;
    std::vector<double> bm;
    const double first = path.jumps.empty() ? std::numeric_limits<double>::infinity() : path.jumps.front().time;
    for (std::size_t k = 0; k < path.times.size(); ++k) {
        if (path.times[k] > first) break;
        if (k > 0 && path.times[k] == first && path.times[k - 1] == first) break;  // post-jump duplicate
        bt.push_back(path.times[k]);
        bm.push_back(path.masses[k]);
    }
    for (std::size_t k = 0; k < free_flow.times().size(); ++k) {
        if (free_flow.times()[k] <= bt.back()) continue;
        bt.push_back(free_flow.times()[k]);
        bm.push_back(free_flow.masses()[k]);
    }
    const MassCurve base(std::move(bt), std::move(bm));

    std::vector<double> births;
    const double c = 2.0 * mass_coefficient;
    auto hat_integral = [&](double t) {
        double acc = base.integral(t);
        for (double r : births)
            if (t > r) acc += c * std::sqrt(t - r);
        return acc;
    };

    std::vector<double> clocks;
    for (const auto& j : path.jumps) clocks.push_back(j.clock_level);
    clocks.push_back(path.pending_clock);
    double target = 0.0;
    double lo = 0.0;
    for (double s : clocks) {
        target += s / rate;
        if (hat_integral(T) < target) break;
        double a = lo;
        double b = T;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(T, 1.0); ++it) {
            const double mid = 0.5 * (a + b);
            if (hat_integral(mid) >= target)
                b = mid;
            else
                a = mid;
        }
        births.push_back(b);
        lo = b;
    }
    rep.hat_times = births;

    for (std::size_t i = 0; i < rep.dual_times.size(); ++i) {
        if (i >= births.size()) {
            ++rep.time_violations;  // the dominating system fired fewer times than the dual
            rep.worst_time_margin = std::numeric_limits<double>::infinity();
            continue;
        }
        const double margin = (births[i] - rep.dual_times[i]) / rep.dual_times[i];
        rep.worst_time_margin = i == 0 ? margin : std::max(rep.worst_time_margin, margin);
        if (margin > rel_slack) ++rep.time_violations;
    }

    for (std::size_t k = 1; k < path.times.size(); ++k) {
        const double t = path.times[k];
        const double dual = integrated_mass(path, t);
        const double hat = hat_integral(t);
        if (hat <= 0.0) continue;
        const double margin = (dual - hat) / hat;
        rep.worst_mass_margin = k == 1 ? margin : std::max(rep.worst_mass_margin, margin);
        if (margin > rel_slack) ++rep.mass_violations;
    }
    return rep;
}

void write_branching_csv(std::ostream& out, const BranchingRecord& record) {
    out << "index,parent,generation,ordinal,birth_time\n";
    for (std::size_t i = 0; i < record.particles.size(); ++i) {
        const auto& p = record.particles[i];
        out << fmt::format("{},{},{},{},{:.17g}\n", i, p.parent, p.generation, p.ordinal, p.birth_time);
    }
}

}  // namespace sbm
