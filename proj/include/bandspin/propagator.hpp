// propagator.hpp — Exact interaction-picture time evolution of pure states
// of the composite system, plus extraction of the reduced observables.
//
// Composite basis layout: index = sys·(N1+N2) + env, with sys ∈ {0,1}
// (0 = lower system level) and env as in model.hpp (lower band first).
//
// The interaction V(t) = σ₊⊗B(t) + σ₋⊗B†(t) couples only the "bright"
// states {|1,n1>, |0,n2>}; amplitudes on |0,n1> and |1,n2> are frozen. The
// default integration path exploits this and propagates the bright sector
// only, with a classical fixed-step 4th-order scheme. A dense full-space
// mode is available for small models and is used by the oracle tests.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bandspin/grid.hpp"
#include "bandspin/model.hpp"

namespace bandspin {

using DensityMatrix2 = Eigen::Matrix2cd;   // elements rho(i,j), i,j in {0,1}

struct PureState {
    Eigen::VectorXcd amplitudes;           // length 2·(N1+N2)
};

// Pure product state (sys ⊗ env); env must have the model's dimension.
PureState product_state(const Eigen::Vector2cd& sys, const Eigen::VectorXcd& env);

// Un-normalized 2x2 blocks correlated with the two bands; rho1 + rho2 equals
// the reduced density matrix.
struct ConditionalDensities {
    DensityMatrix2 rho1 = DensityMatrix2::Zero();
    DensityMatrix2 rho2 = DensityMatrix2::Zero();

    DensityMatrix2 reduced() const { return rho1 + rho2; }
};

// Expectations B_ija = <B̂_ija> of B̂_ija = |i><j| ⊗ Π_a. Stored per band
// with b[a](i,j) = B_ija; note B_ija equals the transposed conditional
// density element rho_a(j,i), and rho_ij = Σ_a B_jia.
struct RelevantSet {
    std::array<Eigen::Matrix2cd, 2> b{Eigen::Matrix2cd::Zero(), Eigen::Matrix2cd::Zero()};
};

struct TrajectoryRecord {
    DensityMatrix2 rho = DensityMatrix2::Zero();
    ConditionalDensities cond;
    double norm = 0.0;                     // ||psi|| at this sample
    std::array<double, 2> band_population{0.0, 0.0};   // tr rho1, tr rho2
};

struct Trajectory {
    std::vector<double> times;
    std::vector<TrajectoryRecord> records;
    std::string method;
    ModelParams params;
    std::uint64_t coupling_seed = 0;
    std::uint64_t env_seed = 0;
    double max_norm_drift = 0.0;           // max | ||psi(t)|| − ||psi(0)|| |
    bool recurrence_warning = false;
};

struct IntegratorOptions {
    double dt = 0.0;                       // 0 → default_time_step(model)
    double norm_tolerance = 1e-9;          // abort threshold for norm drift
    bool full_space = false;               // dense composite-space integration
};

// Default step: min(0.05/δε, 0.1/v̂) with v̂ = λ(√N1+√N2) estimating the
// coupling spectral norm. Phases are bounded by δε, so both scales are
// resolved; a fixed step keeps runs bit-reproducible.
double default_time_step(const TwoBandModel& model);

// Half the recurrence time 2π·min(N1,N2)/δε of the discrete spectrum; beyond
// this the continuum kernel no longer describes the finite model.
double recurrence_guard_time(const TwoBandModel& model);

// Propagate i·dψ/dt = V(t)ψ and sample observables on the grid. Throws
// AccuracyError if the norm drifts by more than opts.norm_tolerance.
Trajectory evolve(const TwoBandModel& model, const PureState& psi0, const TimeGrid& grid,
                  const IntegratorOptions& opts = {});

// rho_ij = Σ_e conj(psi(j,e))·psi(i,e); trace equals ||psi||^2.
DensityMatrix2 reduced_density(const TwoBandModel& model, const PureState& psi);

// Band-resolved partial traces rho_a(i,j) = Σ_{e in band a} conj(psi(j,e))·psi(i,e).
ConditionalDensities conditional_densities(const TwoBandModel& model, const PureState& psi);

RelevantSet relevant_expectations(const TwoBandModel& model, const PureState& psi);

// Dense composite-space V(t) = σ₊⊗B(t) + σ₋⊗B†(t); small models only.
Eigen::MatrixXcd dense_interaction(const TwoBandModel& model, double t);

} // namespace bandspin
