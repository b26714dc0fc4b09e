#include "bandspin/master.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bandspin {

namespace {

using Eigen::Matrix2cd;

void validate_density(const DensityMatrix2& rho, const char* where) {
    if (std::abs(rho(0, 1) - std::conj(rho(1, 0))) > 1e-10 ||
        std::abs(rho(0, 0).imag()) > 1e-10 || std::abs(rho(1, 1).imag()) > 1e-10)
        throw ConfigError(std::string(where) + ": initial state must be Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > 1e-10)
        throw ConfigError(std::string(where) + ": initial state must have unit trace");
    const double det = (rho(0, 0) * rho(1, 1) - rho(0, 1) * rho(1, 0)).real();
    if (rho(0, 0).real() < -1e-10 || rho(1, 1).real() < -1e-10 || det < -1e-10)
        throw ConfigError(std::string(where) + ": initial state must be positive semidefinite");
}

void require_time(double t, const char* where) {
    if (t < 0.0) throw ConfigError(std::string(where) + ": t must be >= 0");
}

DensityMatrix2 assemble(double rho11, std::complex<double> rho01) {
    DensityMatrix2 rho;
    rho(0, 0) = 1.0 - rho11;
    rho(1, 1) = rho11;
    rho(0, 1) = rho01;
    rho(1, 0) = std::conj(rho01);
    return rho;
}

// Elementary 2x2 superoperator pieces for the block equations.
Matrix2cd pump_up(const Matrix2cd& r) {       // σ₊ r σ₋
    Matrix2cd out = Matrix2cd::Zero();
    out(1, 1) = r(0, 0);
    return out;
}
Matrix2cd pump_down(const Matrix2cd& r) {     // σ₋ r σ₊
    Matrix2cd out = Matrix2cd::Zero();
    out(0, 0) = r(1, 1);
    return out;
}
Matrix2cd anti_upper(const Matrix2cd& r) {    // {σ₊σ₋, r}
    Matrix2cd out;
    out(0, 0) = 0.0;
    out(0, 1) = r(0, 1);
    out(1, 0) = r(1, 0);
    out(1, 1) = 2.0 * r(1, 1);
    return out;
}
Matrix2cd anti_lower(const Matrix2cd& r) {    // {σ₋σ₊, r}
    Matrix2cd out;
    out(0, 0) = 2.0 * r(0, 0);
    out(0, 1) = r(0, 1);
    out(1, 0) = r(1, 0);
    out(1, 1) = 0.0;
    return out;
}
Matrix2cd project_upper(const Matrix2cd& r) { // σ₊σ₋ r σ₊σ₋
    Matrix2cd out = Matrix2cd::Zero();
    out(1, 1) = r(1, 1);
    return out;
}
Matrix2cd project_lower(const Matrix2cd& r) { // σ₋σ₊ r σ₋σ₊
    Matrix2cd out = Matrix2cd::Zero();
    out(0, 0) = r(0, 0);
    return out;
}

struct BlockPair {
    Matrix2cd r1, r2;

    BlockPair operator+(const BlockPair& o) const { return {r1 + o.r1, r2 + o.r2}; }
    BlockPair operator*(double s) const { return {s * r1, s * r2}; }
};

BlockPair markov_rhs(const BlockPair& y, double gamma1, double gamma2) {
    return {gamma1 * pump_up(y.r2) - 0.5 * gamma2 * anti_upper(y.r1),
            gamma2 * pump_down(y.r1) - 0.5 * gamma1 * anti_lower(y.r2)};
}

BlockPair tcl4_rhs(const BlockPair& y, const FourthOrderRates& g) {
    return {g.gamma_1 * pump_up(y.r2) - 0.5 * g.gamma_2 * anti_upper(y.r1) -
                g.gamma_3 * project_upper(y.r1),
            g.gamma_2_tilde * pump_down(y.r1) - 0.5 * g.gamma_1_tilde * anti_lower(y.r2) -
                g.gamma_3_tilde * project_lower(y.r2)};
}

template <typename Rhs>
BlockPair rk4_step(const BlockPair& y, double t, double h, Rhs&& rhs) {
    const BlockPair k1 = rhs(t, y);
    const BlockPair k2 = rhs(t + 0.5 * h, y + k1 * (0.5 * h));
    const BlockPair k3 = rhs(t + 0.5 * h, y + k2 * (0.5 * h));
    const BlockPair k4 = rhs(t + h, y + k3 * h);
    return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
}

void validate_correlated_state(const CorrelatedState& s, const char* where) {
    for (const Matrix2cd* r : {&s.rho1, &s.rho2}) {
        if (std::abs((*r)(0, 1) - std::conj((*r)(1, 0))) > 1e-10 ||
            std::abs((*r)(0, 0).imag()) > 1e-10 || std::abs((*r)(1, 1).imag()) > 1e-10)
            throw ConfigError(std::string(where) +
                              ": state is outside the projection range (non-Hermitian block)");
        const double det = ((*r)(0, 0) * (*r)(1, 1) - (*r)(0, 1) * (*r)(1, 0)).real();
        if ((*r)(0, 0).real() < -1e-10 || (*r)(1, 1).real() < -1e-10 || det < -1e-10)
            throw ConfigError(std::string(where) +
                              ": state is outside the projection range (block not PSD)");
    }
    if (std::abs((s.rho1.trace() + s.rho2.trace()).real() - 1.0) > 1e-10)
        throw ConfigError(std::string(where) + ": block traces must sum to 1");
}

// Integrate one block-pair equation over the grid with steps no larger than
// dt_target, sampling at the grid times.
template <typename Rhs>
CorrelatedTrajectory integrate_blocks(const CorrelatedState& state0, const TimeGrid& grid,
                                      double dt_target, Rhs&& rhs) {
    grid.validate();
    CorrelatedTrajectory traj;
    traj.times = grid.times();
    traj.states.reserve(traj.times.size());

    const double spacing = grid.spacing();
    const int steps = std::max(1, static_cast<int>(std::ceil(spacing / dt_target - 1e-12)));
    const double h = spacing / steps;

    BlockPair y{state0.rho1, state0.rho2};
    traj.states.push_back({y.r1, y.r2});
    double t = grid.t_start;
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        for (int k = 0; k < steps; ++k) {
            y = rk4_step(y, t, h, rhs);
            t += h;
        }
        t = traj.times[s];
        traj.states.push_back({y.r1, y.r2});
    }
    return traj;
}

} // namespace

DensityMatrix2 tcl2_standard(const RateSet& rates, const DensityMatrix2& rho0, double t) {
    validate_density(rho0, "tcl2_standard");
    require_time(t, "tcl2_standard");
    const double rho11 = rho0(1, 1).real() * std::exp(-rates.gamma2 * t);
    return assemble(rho11, rho0(0, 1) * std::exp(-0.5 * rates.gamma2 * t));
}

DensityMatrix2 tcl4_standard(const RateSet& rates, const DensityMatrix2& rho0, double t) {
    validate_density(rho0, "tcl4_standard");
    require_time(t, "tcl4_standard");
    const double exponent = -rates.gamma2 * t + 0.5 * rates.gamma1 * rates.gamma2 * t * t;
    const double rho11 = rho0(1, 1).real() * std::exp(exponent);
    return assemble(rho11, rho0(0, 1) * std::exp(-0.5 * rates.gamma2 * t));
}

DensityMatrix2 ham_two_band(const RateSet& rates, const DensityMatrix2& rho0, double t) {
    validate_density(rho0, "ham_two_band");
    require_time(t, "ham_two_band");
    const double total = rates.total();
    if (total == 0.0) return rho0;
    const double weight = std::exp(-total * t);
    const double rho11 =
        rho0(1, 1).real() * (rates.gamma1 + rates.gamma2 * weight) / total;
    return assemble(rho11, rho0(0, 1) * std::exp(-0.5 * rates.gamma2 * t));
}

CorrelatedTrajectory correlated_tcl2(const Kernel& kernel, const RateSet& rates,
                                     const CorrelatedState& state0, const TimeGrid& grid,
                                     CtclMode mode) {
    validate_correlated_state(state0, "correlated_tcl2");
    grid.validate();
    const double total = rates.total();
    const double dt_rate = total > 0.0 ? 0.004 / total : grid.spacing();

    if (mode == CtclMode::Markov) {
        return integrate_blocks(state0, grid, dt_rate,
                                [&](double, const BlockPair& y) {
                                    return markov_rhs(y, rates.gamma1, rates.gamma2);
                                });
    }

    kernel.validate();
    const double dt_target = std::min(dt_rate, 0.04 / kernel.band_width);
    const double spacing = grid.spacing();
    const int steps = std::max(1, static_cast<int>(std::ceil(spacing / dt_target - 1e-12)));
    const double h = spacing / steps;
    // Table step h/2 puts every integrator stage time exactly on a node.
    const KernelIntegralTable table(kernel, std::max(grid.t_end, h), 0.5 * h);

    return integrate_blocks(state0, grid, h,
                            [&](double t, const BlockPair& y) {
                                const double factor = 2.0 * table(t);
                                return markov_rhs(y, rates.gamma1, rates.gamma2) * factor;
                            });
}

CorrelatedTrajectory correlated_tcl4_grid(const RateSet& rates, const CorrelatedState& state0,
                                          const TimeGrid& grid) {
    validate_correlated_state(state0, "correlated_tcl4");
    if (!rates.fourth_order)
        throw ConfigError("correlated_tcl4: fourth-order rates are required");
    const FourthOrderRates& g = *rates.fourth_order;
    const double scale = g.gamma_1 + g.gamma_2_tilde + g.gamma_3;
    const double dt_target = scale > 0.0 ? 0.004 / scale : grid.spacing();
    return integrate_blocks(state0, grid, dt_target,
                            [&](double, const BlockPair& y) { return tcl4_rhs(y, g); });
}

CorrelatedState correlated_tcl4(const RateSet& rates, const CorrelatedState& state0, double t) {
    require_time(t, "correlated_tcl4");
    if (t == 0.0) {
        validate_correlated_state(state0, "correlated_tcl4");
        if (!rates.fourth_order)
            throw ConfigError("correlated_tcl4: fourth-order rates are required");
        return state0;
    }
    TimeGrid grid{0.0, t, 2};
    return correlated_tcl4_grid(rates, state0, grid).states.back();
}

double MultibandRates::detailed_symmetry_violation() const {
    double worst = 0.0;
    const int nb = band_count();
    for (int i = 0; i < sys_dim; ++i)
        for (int j = 0; j < sys_dim; ++j)
            for (int a = 0; a < nb; ++a)
                for (int b = 0; b < nb; ++b) {
                    const double lhs = band_sizes[static_cast<std::size_t>(b)] * gamma(i, j, a, b);
                    const double rhs = band_sizes[static_cast<std::size_t>(a)] * gamma(j, i, b, a);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
    return worst;
}

MultibandTrajectory ham_multiband(const MultibandRates& rates, const MultibandState& b0,
                                  const TimeGrid& grid) {
    grid.validate();
    const int nb = rates.band_count();
    const int d = rates.sys_dim;
    if (nb < 1 || d < 1) throw ConfigError("ham_multiband: empty rate tensor");
    if (static_cast<int>(b0.b.size()) != nb)
        throw ConfigError("ham_multiband: one B-matrix per band required");
    for (const auto& m : b0.b) {
        if (m.rows() != d || m.cols() != d)
            throw ConfigError("ham_multiband: B-matrix dimension mismatch");
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw ConfigError("ham_multiband: B-matrices must satisfy B_ija = conj(B_jia)");
    }
    if (std::abs(b0.total_population() - 1.0) > 1e-10)
        throw ConfigError("ham_multiband: band populations must sum to 1");

    MultibandTrajectory traj;
    const double violation = rates.detailed_symmetry_violation();
    double rate_scale = 0.0;
    for (double g : rates.rates) rate_scale = std::max(rate_scale, g);
    if (violation > 1e-12 * std::max(1.0, rate_scale)) {
        traj.detailed_symmetry_ok = false;
        std::fprintf(stderr,
                     "warning: multiband rate tensor violates detailed symmetry by %.3g; "
                     "total population will not be conserved\n",
                     violation);
    }

    // Off-diagonal damping rates R(i,j,a) = Σ_kb (γ(kiba) + γ(jkba)); note the
    // reversed band order relative to the gain terms.
    std::vector<double> offdiag(static_cast<std::size_t>(d) * d * nb, 0.0);
    auto off_index = [&](int i, int j, int a) {
        return (static_cast<std::size_t>(i) * d + j) * nb + a;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int a = 0; a < nb; ++a) {
                double sum = 0.0;
                for (int k = 0; k < d; ++k)
                    for (int b = 0; b < nb; ++b)
                        sum += rates.gamma(k, i, b, a) + rates.gamma(j, k, b, a);
                offdiag[off_index(i, j, a)] = sum;
            }

    double stiffness = 0.0;
    for (int i = 0; i < d; ++i)
        for (int a = 0; a < nb; ++a) {
            double sum = 0.0;
            for (int j = 0; j < d; ++j)
                for (int b = 0; b < nb; ++b)
                    sum += rates.gamma(i, j, a, b) *
                           std::max(1.0, static_cast<double>(rates.band_sizes[static_cast<std::size_t>(b)]) /
                                             rates.band_sizes[static_cast<std::size_t>(a)]);
            stiffness = std::max(stiffness, sum);
        }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int a = 0; a < nb; ++a)
                stiffness = std::max(stiffness, 0.5 * offdiag[off_index(i, j, a)]);

    auto rhs = [&](const MultibandState& y) {
        MultibandState dy;
        dy.b.assign(static_cast<std::size_t>(nb), Eigen::MatrixXcd::Zero(d, d));
        for (int a = 0; a < nb; ++a) {
            const double na = rates.band_sizes[static_cast<std::size_t>(a)];
            for (int i = 0; i < d; ++i) {
                std::complex<double> acc = 0.0;
                for (int j = 0; j < d; ++j)
                    for (int b = 0; b < nb; ++b) {
                        const double g = rates.gamma(i, j, a, b);
                        if (g == 0.0) continue;
                        const double nb_over_na =
                            rates.band_sizes[static_cast<std::size_t>(b)] / na;
                        acc += g * (y.b[static_cast<std::size_t>(b)](j, j) -
                                    nb_over_na * y.b[static_cast<std::size_t>(a)](i, i));
                    }
                dy.b[static_cast<std::size_t>(a)](i, i) = acc;
                for (int j = 0; j < d; ++j) {
                    if (j == i) continue;
                    dy.b[static_cast<std::size_t>(a)](i, j) =
                        -0.5 * offdiag[off_index(i, j, a)] *
                        y.b[static_cast<std::size_t>(a)](i, j);
                }
            }
        }
        return dy;
    };

    auto axpy = [&](MultibandState& y, double s, const MultibandState& x) {
        for (std::size_t a = 0; a < y.b.size(); ++a) y.b[a] += s * x.b[a];
    };

    traj.times = grid.times();
    traj.states.reserve(traj.times.size());
    const double spacing = grid.spacing();
    const double dt_target = stiffness > 0.0 ? 0.004 / stiffness : spacing;
    const int steps = std::max(1, static_cast<int>(std::ceil(spacing / dt_target - 1e-12)));
    const double h = spacing / steps;

    const double pop0 = b0.total_population();
    MultibandState y = b0;
    traj.states.push_back(y);
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        for (int k = 0; k < steps; ++k) {
            const MultibandState k1 = rhs(y);
            MultibandState w = y;
            axpy(w, 0.5 * h, k1);
            const MultibandState k2 = rhs(w);
            w = y;
            axpy(w, 0.5 * h, k2);
            const MultibandState k3 = rhs(w);
            w = y;
            axpy(w, h, k3);
            const MultibandState k4 = rhs(w);
            axpy(y, h / 6.0, k1);
            axpy(y, h / 3.0, k2);
            axpy(y, h / 3.0, k3);
            axpy(y, h / 6.0, k4);
        }
        traj.population_drift =
            std::max(traj.population_drift, std::abs(y.total_population() - pop0));
        traj.states.push_back(y);
    }
    return traj;
}

} // namespace bandspin
