#pragma once

#include "sbmlab/rng.hpp"

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

/// Raised when a drift or measure description violates its invariants.
class InvalidDrift : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Point mass of a jump-height measure at `lambda` > 0.
struct MeasureAtom {
    double lambda;
    double weight;
};

/// Piecewise-constant density on (breakpoints[0], breakpoints.back()].
/// values[k] is the density on (breakpoints[k], breakpoints[k+1]].
struct DensityTable {
    std::vector<double> breakpoints;
    std::vector<double> values;
};

/// Finite measure on (0, inf): atoms plus an optional piecewise-constant density.
class MeasureSpec {
public:
    MeasureSpec() = default;
    MeasureSpec(std::vector<MeasureAtom> atoms, std::optional<DensityTable> density = std::nullopt);

    const std::vector<MeasureAtom>& atoms() const { return atoms_; }
    const std::optional<DensityTable>& density() const { return density_; }

    /// nu((0, upto]); upto = inf gives the total mass.
    double mass(double upto = std::numeric_limits<double>::infinity()) const;
    /// Integral of exp(-lambda x) over (0, upto].
    double laplace(double x, double upto = std::numeric_limits<double>::infinity()) const;
    /// Inverse of lambda -> nu((0, lambda]) at `target` in (0, mass(upto)].
    double quantile(double target, double upto = std::numeric_limits<double>::infinity()) const;

    bool empty() const { return mass() == 0.0; }

private:
    std::vector<MeasureAtom> atoms_;
    std::optional<DensityTable> density_;
    // Knots of the distribution function: atom locations and breakpoints.
    std::vector<double> knots_;
    std::vector<double> cdf_left_;   // nu((0, knot))
    std::vector<double> cdf_right_;  // nu((0, knot])
    std::vector<double> slope_;      // density on (knot[k-1], knot[k])

    double density_at(double lambda) const;
};

/// Truncation level n of the jump measures; infinite means the untruncated drift.
class TruncationLevel {
public:
    static TruncationLevel finite(double n);
    static TruncationLevel infinity() { return TruncationLevel(); }

    bool is_infinite() const { return !n_.has_value(); }
    /// Level value; +inf for the untruncated level.
    double value() const { return n_ ? *n_ : std::numeric_limits<double>::infinity(); }
    std::string label() const;

private:
    TruncationLevel() = default;
    std::optional<double> n_;
};

struct DriftParams {
    double d1;
    double d2;
    double a;
};

/// Maps boundary values (b0, b1) and the measures to the dual parameters (d1, d2, a).
/// Throws InvalidDrift when h(0) >= 0 fails, i.e. b0 < <nu1 - nu2, 1>.
DriftParams derive_params(double b0, double b1, const MeasureSpec& nu1, const MeasureSpec& nu2);

/// Admissible drift h = h_1 + h_inf with
///   h_1(x)   = int exp(-lambda x) (nu2 - nu1)(d lambda),
///   h_inf(x) = b0 1{x = 0} + b1 1{x > 0}.
/// Immutable after construction.
class DriftSpec {
public:
    DriftSpec(MeasureSpec nu1, MeasureSpec nu2, double b0, double b1);

    /// h == 0.
    static DriftSpec zero() { return DriftSpec({}, {}, 0.0, 0.0); }
    /// Pure boundary drift h_{b0,b1}.
    static DriftSpec step(double b0, double b1) { return DriftSpec({}, {}, b0, b1); }

    const MeasureSpec& nu1() const { return nu1_; }
    const MeasureSpec& nu2() const { return nu2_; }
    double b0() const { return b0_; }
    double b1() const { return b1_; }
    double d1() const { return params_.d1; }
    double d2() const { return params_.d2; }
    double a() const { return params_.a; }
    const DriftParams& params() const { return params_; }

    /// nu^i((0, n]) + d_i for mark i in {1, 2}.
    double mark_mass(int mark, const TruncationLevel& level) const;
    /// Total jump intensity nu_n((0, inf]) = nu^1 + nu^2 restricted to (0, n], plus d1 + d2.
    double total_rate(const TruncationLevel& level) const;

    /// h_inf reconstructed from (d1, d2, a): 2 d2 1{x=0} + (d1 + d2) 1{x>0} + <nu1 + nu2, 1> + a.
    double reconstructed_boundary(double x) const;

private:
    MeasureSpec nu1_;
    MeasureSpec nu2_;
    double b0_;
    double b1_;
    DriftParams params_;
};

/// h(x) for x >= 0.
double eval_drift(double x, const DriftSpec& spec);

/// h_n(x) = int_0^n (1 - e^{-lambda x}) nu1 + int_0^n (1 + e^{-lambda x}) nu2
///          + d1 (1 - e^{-nx}) + d2 (1 + e^{-nx}) + a.
/// An infinite level falls back to eval_drift.
double eval_drift_truncated(double x, const DriftSpec& spec, const TruncationLevel& level);

/// Mark of a dual jump: P(i) proportional to nu^i((0, n]) + d_i.
int sample_jump_mark(RngStream& rng, const DriftSpec& spec, const TruncationLevel& level);

/// Height of a dual jump given its mark. Returns n (finite level) or +inf
/// (infinite level) with probability d_mark / (nu^mark((0,n]) + d_mark).
/// Always consumes exactly two uniforms so paired runs stay aligned.
double sample_jump_height(RngStream& rng, int mark, const DriftSpec& spec, const TruncationLevel& level);

}  // namespace sbm
