// projections.hpp — Projection superoperators on dense density matrices of
// the composite system, plus the Hilbert-space-average state construction.
//
// Everything here works on explicit matrices and is meant for small
// environments; it exists as the correctness oracle for the structures the
// master-equation solvers assume, not as a production path.
//
// Basis layout matches propagator.hpp: row index = sys·dim_E + env.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bandspin/errors.hpp"

namespace bandspin {

// Orthogonal decomposition of the environment identity into diagonal 0/1
// band projectors Π_a of sizes N_a.
struct BandPartition {
    std::vector<int> band_sizes;

    void validate() const {
        if (band_sizes.empty()) throw ConfigError("partition: needs at least one band");
        for (int n : band_sizes)
            if (n < 1) throw ConfigError("partition: band sizes must be positive");
    }

    int band_count() const { return static_cast<int>(band_sizes.size()); }

    int env_dim() const {
        int d = 0;
        for (int n : band_sizes) d += n;
        return d;
    }

    int offset(int a) const {
        int off = 0;
        for (int b = 0; b < a; ++b) off += band_sizes[static_cast<std::size_t>(b)];
        return off;
    }
};

// sys ⊗ env with the system as the slow index.
Eigen::MatrixXcd kron_sys_env(const Eigen::Matrix2cd& sys, const Eigen::MatrixXcd& env);

// Dense Π_a on the environment.
Eigen::MatrixXcd env_projector(const BandPartition& partition, int a);

// tr_E over the full environment; system dimension 2.
Eigen::Matrix2cd partial_trace_env(const Eigen::MatrixXcd& rho);

// tr_E{Π_a ρ}.
Eigen::Matrix2cd band_trace(const Eigen::MatrixXcd& rho, const BandPartition& partition, int a);

// Standard projection Pρ = (tr_E ρ) ⊗ reference.
Eigen::MatrixXcd project_standard(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& reference);

// Correlated projection Pρ = Σ_a tr_E{Π_a ρ} ⊗ Π_a/N_a.
Eigen::MatrixXcd project_correlated(const Eigen::MatrixXcd& rho, const BandPartition& partition);

// Hilbert space average compatible with the expectations B_ija of
// B̂_ija = |i><j| ⊗ Π_a, supplied as b_values[a](i,j) = B_ija. Returns
// α = Σ_ija (B_jia/N_a)·B̂_ija and cross-checks it against the generic
// Gram-system solution tr{α B̂_m} = B_m, which must agree to 1e-12.
Eigen::MatrixXcd ham_average_state(const std::vector<Eigen::Matrix2cd>& b_values,
                                   const BandPartition& partition);

} // namespace bandspin
