// model.hpp — The two-band model: a two-level system coupled to an
// environment of N1 + N2 levels arranged in two quasi-degenerate bands of
// width δε, with random complex Gaussian couplings between the bands.
//
// All dynamics is formulated in the interaction picture, where only the
// detunings ω(n1,n2) = δε·(n2/N2 − n1/N1) enter; the band gap never appears
// as a runtime parameter. Level indices run 1..N within each band, so the
// within-band energies are δε·n/N and span (0, δε].
//
// Environment basis order: the N1 lower-band levels first, then the N2
// upper-band levels.

#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "bandspin/errors.hpp"

namespace bandspin {

struct ModelParams {
    int n1 = 0;                    // lower-band level count
    int n2 = 0;                    // upper-band level count
    double band_width = 0.0;       // δε
    double coupling = 0.0;         // λ

    void validate() const {
        if (n1 < 1 || n2 < 1)
            throw ConfigError("model: band level counts must satisfy N1 >= 1 and N2 >= 1");
        if (!(band_width > 0.0))
            throw ConfigError("model: band width must be positive");
        if (coupling < 0.0)
            throw ConfigError("model: coupling strength must be nonnegative");
    }
};

// One sampled coupling matrix c(n1,n2), a deterministic function of
// (N1, N2, seed). Entries are i.i.d. complex Gaussian with <|c|^2> = 1,
// <c^2> = 0, filled row by row.
struct CouplingMatrix {
    Eigen::MatrixXcd entries;      // N1 x N2
    std::uint64_t seed = 0;
};

CouplingMatrix sample_couplings(int n1, int n2, std::uint64_t seed);

// A single realization: parameters, one coupling draw, and the band energies.
struct TwoBandModel {
    ModelParams params;
    CouplingMatrix couplings;
    Eigen::VectorXd lower_energies;   // δε·n/N1, n = 1..N1
    Eigen::VectorXd upper_energies;   // δε·n/N2, n = 1..N2

    int env_dim() const { return params.n1 + params.n2; }

    // Detuning of the transition |n1><n2| (0-based level indices).
    double omega(int i1, int i2) const {
        return upper_energies[i2] - lower_energies[i1];
    }
};

TwoBandModel build_model(const ModelParams& params, std::uint64_t seed);

// Normalized environment vector supported on the lower band: zero upper-band
// amplitudes, i.i.d. complex Gaussian lower-band amplitudes scaled to unit
// norm. Length N1 + N2.
Eigen::VectorXcd random_lower_band_state(const TwoBandModel& model, std::uint64_t seed);

// Interaction-picture coupling matrix B(t)/|n1><n2| block:
// entry (n1,n2) = λ·c(n1,n2)·exp(−i·ω(n1,n2)·t).
Eigen::MatrixXcd interaction_coupling(const TwoBandModel& model, double t);

} // namespace bandspin
