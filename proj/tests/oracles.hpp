// oracles.hpp — test-only reference implementations. These are written from
// first principles and kept independent of the library code paths they check:
// the interaction matrix, the propagation loop, and the partial traces are
// all re-derived here with plain loops.

#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bandspin/model.hpp"

namespace oracle {

inline constexpr std::complex<double> kI{0.0, 1.0};

// Composite-space interaction from scratch: basis index sys·(N1+N2)+env,
// couplings λ·c(n1,n2)·exp(−i·δε·(n2/N2 − n1/N1)·t) between |1,n1> and |0,n2>.
inline Eigen::MatrixXcd interaction(const bandspin::TwoBandModel& m, double t) {
    const int n1 = m.params.n1;
    const int n2 = m.params.n2;
    const int ne = n1 + n2;
    const double de = m.params.band_width;
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2 * ne, 2 * ne);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const double omega = de * ((j + 1.0) / n2 - (i + 1.0) / n1);
            const std::complex<double> amp =
                m.params.coupling * m.couplings.entries(i, j) * std::exp(-kI * omega * t);
            v(ne + i, n1 + j) = amp;                  // <1,n1| V |0,n2>
            v(n1 + j, ne + i) = std::conj(amp);
        }
    return v;
}

// Explicit time-ordered RK4 integration of i·dψ/dt = V(t)ψ on the full space.
inline Eigen::VectorXcd propagate(const bandspin::TwoBandModel& m, Eigen::VectorXcd psi,
                                  double t0, double t1, int steps) {
    const double h = (t1 - t0) / steps;
    for (int s = 0; s < steps; ++s) {
        const double t = t0 + s * h;
        const Eigen::VectorXcd k1 = -kI * (interaction(m, t) * psi);
        const Eigen::VectorXcd k2 = -kI * (interaction(m, t + 0.5 * h) * (psi + 0.5 * h * k1));
        const Eigen::VectorXcd k3 = -kI * (interaction(m, t + 0.5 * h) * (psi + 0.5 * h * k2));
        const Eigen::VectorXcd k4 = -kI * (interaction(m, t + h) * (psi + h * k3));
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return psi;
}

// Partial traces by explicit element loops.
inline Eigen::Matrix2cd reduced(const Eigen::VectorXcd& psi, int env_dim) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int e = 0; e < env_dim; ++e)
                rho(i, j) += psi[i * env_dim + e] * std::conj(psi[j * env_dim + e]);
    return rho;
}

inline Eigen::Matrix2cd band_block(const Eigen::VectorXcd& psi, int env_dim, int offset,
                                   int count) {
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int e = offset; e < offset + count; ++e)
                rho(i, j) += psi[i * env_dim + e] * std::conj(psi[j * env_dim + e]);
    return rho;
}

inline std::complex<double> random_unit(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return {dist(gen), dist(gen)};
}

inline Eigen::MatrixXcd random_matrix(int dim, std::mt19937_64& gen) {
    Eigen::MatrixXcd m(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m(i, j) = random_unit(gen);
    return m;
}

inline Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& gen) {
    const Eigen::MatrixXcd g = random_matrix(dim, gen);
    return 0.5 * (g + g.adjoint());
}

// Positive semidefinite with unit trace.
inline Eigen::MatrixXcd random_density(int dim, std::mt19937_64& gen) {
    const Eigen::MatrixXcd g = random_matrix(dim, gen);
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace();
    return rho;
}

inline Eigen::VectorXcd random_state(int dim, std::mt19937_64& gen) {
    Eigen::VectorXcd psi(dim);
    for (int i = 0; i < dim; ++i) psi[i] = random_unit(gen);
    psi /= psi.norm();
    return psi;
}

// Finite geometric phase sums S(τ) = Σ_{n=1..N} exp(−i·δε·n·τ/N), the
// building block of the ensemble-averaged correlators of Gaussian couplings.
inline std::complex<double> phase_sum(int count, double band_width, double tau) {
    std::complex<double> acc = 0.0;
    for (int n = 1; n <= count; ++n) acc += std::exp(-kI * (band_width * n / count) * tau);
    return acc;
}

} // namespace oracle
