#include "sbmlab/drift.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace sbm {

MeasureSpec::MeasureSpec(std::vector<MeasureAtom> atoms, std::optional<DensityTable> density)
    : atoms_(std::move(atoms)), density_(std::move(density)) {
    for (const auto& atom : atoms_) {
        if (!(atom.lambda > 0.0) || !std::isfinite(atom.lambda))
            throw InvalidDrift(fmt::format("measure atom location must be positive and finite, got {}", atom.lambda));
        if (!(atom.weight >= 0.0) || !std::isfinite(atom.weight))
            throw InvalidDrift(fmt::format("measure atom weight must be nonnegative, got {}", atom.weight));
    }
    if (density_) {
        const auto& bp = density_->breakpoints;
        const auto& vals = density_->values;
        if (bp.size() < 2 || vals.size() + 1 != bp.size())
            throw InvalidDrift("density table needs K+1 breakpoints for K values");
        if (!(bp.front() >= 0.0)) throw InvalidDrift("density breakpoints must be nonnegative");
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            if (!(bp[k + 1] > bp[k]) || !std::isfinite(bp[k + 1]))
                throw InvalidDrift("density breakpoints must be strictly increasing and finite");
            if (!(vals[k] >= 0.0) || !std::isfinite(vals[k]))
                throw InvalidDrift("density values must be nonnegative and finite");
        }
    }

    for (const auto& atom : atoms_) knots_.push_back(atom.lambda);
    if (density_) knots_.insert(knots_.end(), density_->breakpoints.begin(), density_->breakpoints.end());
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());

    cdf_left_.resize(knots_.size());
    cdf_right_.resize(knots_.size());
    slope_.resize(knots_.size());
    double prev_knot = 0.0;
    double running = 0.0;
    for (std::size_t k = 0; k < knots_.size(); ++k) {
        const double mid = 0.5 * (prev_knot + knots_[k]);
        slope_[k] = knots_[k] > prev_knot ? density_at(mid) : 0.0;
        running += slope_[k] * (knots_[k] - prev_knot);
        cdf_left_[k] = running;
        for (const auto& atom : atoms_)
            if (atom.lambda == knots_[k]) running += atom.weight;
        cdf_right_[k] = running;
        prev_knot = knots_[k];
    }
}

double MeasureSpec::density_at(double lambda) const {
    if (!density_) return 0.0;
    const auto& bp = density_->breakpoints;
    if (lambda <= bp.front() || lambda > bp.back()) return 0.0;
    const auto it = std::lower_bound(bp.begin(), bp.end(), lambda);
    return density_->values[static_cast<std::size_t>(it - bp.begin()) - 1];
}

double MeasureSpec::mass(double upto) const {
    if (knots_.empty() || !(upto > 0.0)) return 0.0;
    if (upto >= knots_.back()) return cdf_right_.back();
    // k: first knot strictly above upto.
    const auto k = static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), upto) - knots_.begin());
    const double base_knot = k == 0 ? 0.0 : knots_[k - 1];
    const double base = k == 0 ? 0.0 : cdf_right_[k - 1];
    return base + slope_[k] * (upto - base_knot);
}

double MeasureSpec::laplace(double x, double upto) const {
    double total = 0.0;
    for (const auto& atom : atoms_)
        if (atom.lambda <= upto) total += atom.weight * std::exp(-atom.lambda * x);
    if (density_) {
        const auto& bp = density_->breakpoints;
        for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
            const double lo = bp[k];
            if (lo >= upto) break;
            const double hi = std::min(bp[k + 1], upto);
            const double v = density_->values[k];
            if (v == 0.0) continue;
            if (x == 0.0)
                total += v * (hi - lo);
            else
                total += v * std::exp(-lo * x) * (-std::expm1(-(hi - lo) * x)) / x;
        }
    }
    return total;
}

double MeasureSpec::quantile(double target, double upto) const {
    const double cap = mass(upto);
    if (!(target > 0.0) || target > cap * (1.0 + 1e-12) || cap == 0.0)
        throw std::domain_error(fmt::format("measure quantile target {} outside (0, {}]", target, cap));
    target = std::min(target, cap);
    const auto k = static_cast<std::size_t>(
        std::lower_bound(cdf_right_.begin(), cdf_right_.end(), target) - cdf_right_.begin());
    if (k >= knots_.size()) return std::min(knots_.back(), upto);
    double lambda;
    if (target <= cdf_left_[k] && slope_[k] > 0.0) {
        const double base_knot = k == 0 ? 0.0 : knots_[k - 1];
        const double base = k == 0 ? 0.0 : cdf_right_[k - 1];
        lambda = base_knot + (target - base) / slope_[k];
    } else {
        lambda = knots_[k];
    }
    return std::min(lambda, upto);
}

TruncationLevel TruncationLevel::finite(double n) {
    if (!(n > 0.0) || !std::isfinite(n))
        throw InvalidDrift(fmt::format("truncation level must be positive and finite, got {}", n));
    TruncationLevel level;
    level.n_ = n;
    return level;
}

std::string TruncationLevel::label() const { return n_ ? fmt::format("{}", *n_) : std::string("inf"); }

DriftParams derive_params(double b0, double b1, const MeasureSpec& nu1, const MeasureSpec& nu2) {
    const double m1 = nu1.mass();
    const double m2 = nu2.mass();
    const double floor = m1 - m2;
    if (!std::isfinite(b0) || !std::isfinite(b1))
        throw InvalidDrift("b0 and b1 must be finite");
    if (b0 < floor - 1e-12 * (1.0 + std::abs(m1) + std::abs(m2)))
        throw InvalidDrift(fmt::format("h(0) >= 0 violated: b0 = {} < <nu1 - nu2, 1> = {}", b0, floor));
    const double total = m1 + m2;
    if (b0 < b1) {
        if (b0 >= 0.0) return {b1 - b0 / 2.0, b0 / 2.0, -total};
        // b0 < 0 would make d2 negative; shift the constant into a instead.
        return {b1 - b0, 0.0, b0 - total};
    }
    return {0.0, b0 - b1, 2.0 * b1 - b0 - total};
}

DriftSpec::DriftSpec(MeasureSpec nu1, MeasureSpec nu2, double b0, double b1)
    : nu1_(std::move(nu1)), nu2_(std::move(nu2)), b0_(b0), b1_(b1),
      params_(derive_params(b0, b1, nu1_, nu2_)) {}

double DriftSpec::mark_mass(int mark, const TruncationLevel& level) const {
    const double n = level.value();
    switch (mark) {
        case 1: return nu1_.mass(n) + params_.d1;
        case 2: return nu2_.mass(n) + params_.d2;
        default: throw std::invalid_argument(fmt::format("jump mark must be 1 or 2, got {}", mark));
    }
}

double DriftSpec::total_rate(const TruncationLevel& level) const {
    return mark_mass(1, level) + mark_mass(2, level);
}

double DriftSpec::reconstructed_boundary(double x) const {
    const double base = nu1_.mass() + nu2_.mass() + params_.a;
    return x == 0.0 ? 2.0 * params_.d2 + base : params_.d1 + params_.d2 + base;
}

double eval_drift(double x, const DriftSpec& spec) {
    if (!(x >= 0.0)) throw std::domain_error(fmt::format("drift evaluated at negative state {}", x));
    const double h1 = spec.nu2().laplace(x) - spec.nu1().laplace(x);
    return h1 + (x == 0.0 ? spec.b0() : spec.b1());
}

double eval_drift_truncated(double x, const DriftSpec& spec, const TruncationLevel& level) {
    if (level.is_infinite()) return eval_drift(x, spec);
    if (!(x >= 0.0)) throw std::domain_error(fmt::format("drift evaluated at negative state {}", x));
    const double n = level.value();
    const double part1 = spec.nu1().mass(n) - spec.nu1().laplace(x, n);
    const double part2 = spec.nu2().mass(n) + spec.nu2().laplace(x, n);
    const double e = std::exp(-n * x);
    return part1 + part2 + spec.d1() * (-std::expm1(-n * x)) + spec.d2() * (1.0 + e) + spec.a();
}

int sample_jump_mark(RngStream& rng, const DriftSpec& spec, const TruncationLevel& level) {
    const double m1 = spec.mark_mass(1, level);
    const double m2 = spec.mark_mass(2, level);
    const double u = rng.uniform();
    if (!(m1 + m2 > 0.0)) throw std::domain_error("jump mark requested with zero total jump intensity");
    return u * (m1 + m2) < m1 ? 1 : 2;
}

double sample_jump_height(RngStream& rng, int mark, const DriftSpec& spec, const TruncationLevel& level) {
    const double total = spec.mark_mass(mark, level);
    const MeasureSpec& nu = mark == 1 ? spec.nu1() : spec.nu2();
    const double d = mark == 1 ? spec.d1() : spec.d2();
    const double n = level.value();
    const double finite_mass = nu.mass(n);
    const double u_branch = rng.uniform();
    const double u_height = rng.uniform();
    if (!(total > 0.0)) throw std::domain_error(fmt::format("jump height requested for zero-mass mark {}", mark));
    if (u_branch * total < d) return n;
    return nu.quantile(u_height * finite_mass, n);
}

}  // namespace sbm
