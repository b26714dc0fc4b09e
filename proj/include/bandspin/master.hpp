// master.hpp — Reduced-dynamics approximation solvers: the standard TCL2 and
// TCL4 closed forms, the HAM rate equations, the correlated-projection TCL2
// equations (Markov limit and full memory kernel), the correlated TCL4
// equations, and a generic multi-band HAM ODE engine.
//
// Population conventions: rho(1,1) is the upper-level population. All ODE
// solvers use a classical fixed-step 4th-order integrator, which preserves
// the linear trace invariants of these equations to roundoff.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bandspin/correlations.hpp"
#include "bandspin/grid.hpp"
#include "bandspin/propagator.hpp"

namespace bandspin {

// Time-dependent rates of the standard fourth-order expansion:
// Γ(t) = γ2(1 − γ1·t) and Γ̃(t) = γ1γ2·t.
struct TclStandardRates {
    double gamma1 = 0.0;
    double gamma2 = 0.0;

    double relaxation(double t) const { return gamma2 * (1.0 - gamma1 * t); }
    double dephasing(double t) const { return gamma1 * gamma2 * t; }
};

inline TclStandardRates tcl_standard_rates(const RateSet& rates) {
    return {rates.gamma1, rates.gamma2};
}

// Standard-projection TCL2 (Lindblad) closed form:
// rho11(t) = rho11(0)·exp(−γ2 t), rho01(t) = rho01(0)·exp(−γ2 t/2).
// Predicts relaxation to zero population, which is the wrong stationary state.
DensityMatrix2 tcl2_standard(const RateSet& rates, const DensityMatrix2& rho0, double t);

// Standard-projection TCL4 closed form:
// rho11(t) = rho11(0)·exp(−γ2 t + γ1γ2 t²/2). Improves the short-time
// behavior but grows without bound; the divergence is the documented result.
DensityMatrix2 tcl4_standard(const RateSet& rates, const DensityMatrix2& rho0, double t);

// HAM rate-equation solution for initial environment occupation in band 1:
// rho11(t) = rho11(0)·[γ1 + γ2·exp(−(γ1+γ2)t)]/(γ1+γ2), coherence decay at
// γ2/2 (the equations coincide with the correlated TCL2 Markov limit).
DensityMatrix2 ham_two_band(const RateSet& rates, const DensityMatrix2& rho0, double t);

// Dynamical variables of the correlated projection: the pair of
// un-normalized band-correlated blocks.
using CorrelatedState = ConditionalDensities;

enum class CtclMode { Markov, Memory };

struct CorrelatedTrajectory {
    std::vector<double> times;
    std::vector<CorrelatedState> states;
};

// Correlated-projection TCL2. Markov mode integrates
//   d rho1/dt = γ1 σ₊ rho2 σ₋ − (γ2/2){σ₊σ₋, rho1},
//   d rho2/dt = γ2 σ₋ rho1 σ₊ − (γ1/2){σ₋σ₊, rho2};
// memory mode scales the right-hand side by 2∫₀ᵗ h(t−t1) dt1, which is
// dΓ/dt/(γ1+γ2) and approaches 1.
CorrelatedTrajectory correlated_tcl2(const Kernel& kernel, const RateSet& rates,
                                     const CorrelatedState& state0, const TimeGrid& grid,
                                     CtclMode mode);

// Correlated-projection TCL4 (exponential-kernel rates):
//   d rho1/dt = Γ1 σ₊ rho2 σ₋ − (Γ2/2){σ₊σ₋, rho1} − Γ3 σ₊σ₋ rho1 σ₊σ₋,
//   d rho2/dt = Γ̃2 σ₋ rho1 σ₊ − (Γ̃1/2){σ₋σ₊, rho2} − Γ̃3 σ₋σ₊ rho2 σ₋σ₊.
// The stationary state equals the second-order one; only the relaxation rate
// changes, to Γ1 + Γ̃2.
CorrelatedTrajectory correlated_tcl4_grid(const RateSet& rates, const CorrelatedState& state0,
                                          const TimeGrid& grid);
CorrelatedState correlated_tcl4(const RateSet& rates, const CorrelatedState& state0, double t);

// Rate tensor γ(i,j,a,b) of the generic multi-band HAM equations: the rate of
// the transition (j, band b) → (i, band a). Conservation of Σ_ia B_iia
// requires the detailed symmetry N_b·γ(ijab) = N_a·γ(jiba).
struct MultibandRates {
    int sys_dim = 2;
    std::vector<int> band_sizes;
    std::vector<double> rates;   // flattened (i, j, a, b)

    void resize() {
        const auto nb = band_sizes.size();
        rates.assign(static_cast<std::size_t>(sys_dim) * sys_dim * nb * nb, 0.0);
    }

    int band_count() const { return static_cast<int>(band_sizes.size()); }

    double& gamma(int i, int j, int a, int b) {
        return rates[index(i, j, a, b)];
    }
    double gamma(int i, int j, int a, int b) const {
        return rates[index(i, j, a, b)];
    }

    // max |N_b·γ(ijab) − N_a·γ(jiba)| over all index combinations
    double detailed_symmetry_violation() const;

private:
    std::size_t index(int i, int j, int a, int b) const {
        const auto nb = static_cast<std::size_t>(band_count());
        return ((static_cast<std::size_t>(i) * sys_dim + j) * nb + a) * nb + b;
    }
};

// Relevant variables per band: b[a](i,j) = B_ija.
struct MultibandState {
    std::vector<Eigen::MatrixXcd> b;

    double total_population() const {
        double p = 0.0;
        for (const auto& m : b) p += m.diagonal().real().sum();
        return p;
    }
};

struct MultibandTrajectory {
    std::vector<double> times;
    std::vector<MultibandState> states;
    bool detailed_symmetry_ok = true;
    double population_drift = 0.0;   // max |Σ B_iia(t) − Σ B_iia(0)|
};

// Integrates dB_iia/dt = Σ_jb γ(ijab)(B_jjb − (N_b/N_a)B_iia) and
// dB_ija/dt = −(1/2)B_ija Σ_kb (γ(kiba) + γ(jkba)) for i ≠ j. A rate tensor
// violating detailed symmetry is integrated anyway, with a warning and the
// resulting population drift reported in the trajectory.
MultibandTrajectory ham_multiband(const MultibandRates& rates, const MultibandState& b0,
                                  const TimeGrid& grid);

} // namespace bandspin
