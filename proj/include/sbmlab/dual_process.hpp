#pragma once

#include "sbmlab/drift.hpp"
#include "sbmlab/grid.hpp"
#include "sbmlab/log_laplace.hpp"
#include "sbmlab/rng.hpp"
#include "sbmlab/singular_profile.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sbm {

/// Raised when a path exceeds the jump cap; carries the partial count.
class DualAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Field plus pending atoms. Atom masses may be +inf (level infinity only);
/// `absorb` folds pending atoms into the field before the next flow step.
struct RegMeasureState {
    Field field;
    std::vector<PointMass> atoms;

    explicit RegMeasureState(Field f) : field(std::move(f)) {}
};

/// Appends the atom (location, height). Throws std::logic_error for an
/// infinite height at a finite level and std::invalid_argument for height <= 0.
void apply_jump(RegMeasureState& state, double location, double height, const TruncationLevel& level);

/// Finite atoms become grid deltas; infinite atoms become the very singular
/// profile W_{warm_start}(. - location). Returns true when anything was absorbed.
bool absorb(RegMeasureState& state, double warm_start, const SingularProfile* profile);

/// Grid node drawn with probability proportional to its value; returns its coordinate.
double sample_jump_location(RngStream& rng, const Field& field);

/// Solves rate * s * (mass0 + mass_after(s)) / 2 = deficit for s in (0, tau]
/// by bisection to |interval| <= rel_tol * tau. Requires the crossing to be
/// bracketed by tau. Returns the upper end so the clock is never undershot.
double bisect_clock_crossing(double deficit, double rate, double mass0, double tau,
                             const std::function<double(double)>& mass_after, double rel_tol);

struct JumpRecord {
    double time = 0.0;
    double location = 0.0;
    double height = 0.0;   // +inf for the symbolic infinite atom
    int mark = 1;
    double clock_level = 0.0;     // the Exp(1) variate S_k
    double clock_integral = 0.0;  // rate * int <Y_s,1> ds over the gap, as accumulated
    double censor_level = -1.0;   // clock of the jump-free continuation to the horizon (if recorded)
};

struct DualPath {
    double horizon = 0.0;
    double rate = 0.0;
    std::vector<JumpRecord> jumps;
    double pending_clock = 0.0;     // S_{K+1}, the clock that did not fire
    double pending_integral = 0.0;  // its accumulated clock at the horizon
    std::vector<double> times;      // mass trajectory; a jump appears as a repeated time
    std::vector<double> masses;
    double integral = 0.0;          // trapezoid int_0^T <Y_s,1> ds
    Field final_field;
    std::vector<std::pair<double, Field>> snapshots;
    FlowStats stats;

    explicit DualPath(Grid1D g) : final_field(g) {}

    std::size_t jump_count() const { return jumps.size(); }
    /// J(t): number of mark-2 jumps at or before t.
    int sign_count(double t) const;
    int sign_count() const { return sign_count(horizon); }
    int parity() const { return sign_count() % 2; }
};

/// Trapezoid value of int_0^t <Y_s,1> ds from the recorded trajectory.
double integrated_mass(const DualPath& path, double t);

struct DualConfig {
    Grid1D grid;
    FlowOptions flow{};
    double horizon = 0.1;
    TruncationLevel level = TruncationLevel::infinity();
    double warm_start = 1e-3;
    std::vector<double> snapshot_times{};
    double clock_tolerance = 1e-6;
    std::size_t max_jumps = 1'000'000;
    bool record_censoring = false;
};

class DualSimulator {
public:
    /// The profile is computed on demand when infinite atoms are possible.
    DualSimulator(DriftSpec spec, DualConfig config, std::shared_ptr<const SingularProfile> profile = nullptr);

    /// Simulates Y on [0, horizon] from Y0 (finite atoms and an optional field;
    /// an atom with mass +inf is allowed at level infinity).
    DualPath simulate(const InitialData& y0, RngStream& rng) const;

    const DriftSpec& spec() const { return spec_; }
    const DualConfig& config() const { return config_; }
    double rate() const { return rate_; }
    const std::shared_ptr<const SingularProfile>& profile() const { return profile_; }

private:
    double continuation_clock(const Field& v, StepPlan plan, double t) const;

    DriftSpec spec_;
    DualConfig config_;
    std::shared_ptr<const SingularProfile> profile_;
    double rate_;
};

DualPath simulate_dual(const DriftSpec& spec, const DualConfig& config, const InitialData& y0, std::uint64_t seed,
                       std::uint64_t path_id = 0);

/// One header line (seed, level, horizon, summary) then one JSON object per jump.
void write_dual_jsonl(std::ostream& out, const DualPath& path, std::uint64_t seed, const TruncationLevel& level);

}  // namespace sbm
