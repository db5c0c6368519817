#pragma once

#include "sbmlab/drift.hpp"
#include "sbmlab/grid.hpp"
#include "sbmlab/rng.hpp"

#include <iosfwd>
#include <string>
#include <stdexcept>
#include <vector>

namespace sbm {

class SpdeAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Noise step applied after the explicit drift/diffusion step.
///  Feller:        exact Feller transition per node (Poisson mixture of Gammas), no clipping needed.
///  EulerClip:     X + sqrt(dt/dx) sqrt(X) xi, clipped at 0.
///  FellerCoupled: Feller transition by inversion from two uniforms per node and step,
///                 so two runs with the same stream share noise and stay ordered.
enum class NoiseScheme { Feller, EulerClip, FellerCoupled };

NoiseScheme parse_noise_scheme(const std::string& name);
std::string to_string(NoiseScheme scheme);

struct SpdeParams {
    Grid1D grid;
    double dt = 1e-3;
    double horizon = 0.25;
    DriftSpec drift = DriftSpec::zero();
    TruncationLevel level = TruncationLevel::infinity();  // finite: drift h_n instead of h
    NoiseScheme scheme = NoiseScheme::Feller;
    double noise_scale = 1.0;     // 0 turns the equation deterministic
    double zero_threshold = 0.0;  // values <= this count as the tie x = 0 for the drift
    std::vector<double> snapshot_times{};
    bool record_mass = false;
};

struct SpdePath {
    std::vector<std::pair<double, Field>> snapshots;
    Field final_field;
    std::vector<double> masses;   // per step when requested, masses[0] at t = 0
    double clipped_mass = 0.0;    // total mass added by clipping
    double min_before_clip = 0.0; // most negative value seen before clipping
    std::size_t steps = 0;

    explicit SpdePath(Grid1D g) : final_field(g) {}
};

/// Steps used for [0, horizon]: ceil(horizon / dt), with the step shrunk to fit exactly.
std::size_t spde_step_count(const SpdeParams& params);

/// Throws std::invalid_argument when dt > dx^2 / 2 or parameters are malformed.
void validate(const SpdeParams& params);

SpdePath simulate_spde(const Field& x0, const SpdeParams& params, RngStream& rng);

/// exp(-sum_j w_j X(x_j)) with nearest-node evaluation.
double laplace_functional(const Field& x, const std::vector<PointMass>& mu);

/// sup_x exp(lam |x|) X(x) over the nodes, lam < 0.
double ctem_norm(const Field& x, double lam);

/// dx * #{i : X_i > eps}.
double cozero_measure(const Field& x, double eps = 0.0);

/// "x,value" rows.
void write_field_csv(std::ostream& out, const Field& field);

}  // namespace sbm
