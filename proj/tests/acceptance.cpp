// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. The fig2-scale exact ensemble is computed once and shared
// by the criteria that consume it.

#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "bandspin/harness.hpp"
#include "bandspin/projections.hpp"
#include "bandspin/rng.hpp"

#include "oracles.hpp"

using namespace bandspin;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool ok, const std::string& detail) {
    std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, label.c_str(), detail.c_str());
    if (!ok) ++failures;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

DensityMatrix2 upper_density() {
    DensityMatrix2 rho = DensityMatrix2::Zero();
    rho(1, 1) = 1.0;
    return rho;
}

// --- criterion 7 helpers -----------------------------------------------------

double small_scale_propagation_error() {
    const ModelParams p{4, 4, 0.5, 0.02};
    const TwoBandModel m = build_model(p, 4242);
    std::mt19937_64 gen(17);
    Eigen::Vector2cd sys;
    sys << std::complex<double>(0.6, 0.0), std::complex<double>(0.0, 0.8);
    const PureState psi0 = product_state(sys, oracle::random_state(m.env_dim(), gen));

    const TimeGrid grid{0.0, 16.0, 17};
    IntegratorOptions opts;
    opts.dt = 0.05;
    const Trajectory traj = evolve(m, psi0, grid, opts);

    double worst = 0.0;
    Eigen::VectorXcd ref = psi0.amplitudes;
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        ref = oracle::propagate(m, ref, traj.times[s - 1], traj.times[s], 200);
        const auto& rec = traj.records[s];
        worst = std::max(worst,
                         (rec.rho - oracle::reduced(ref, m.env_dim())).cwiseAbs().maxCoeff());
        worst = std::max(
            worst,
            (rec.cond.rho1 - oracle::band_block(ref, m.env_dim(), 0, p.n1)).cwiseAbs().maxCoeff());
        worst = std::max(
            worst, (rec.cond.rho2 - oracle::band_block(ref, m.env_dim(), p.n1, p.n2))
                       .cwiseAbs()
                       .maxCoeff());
    }
    return worst;
}

struct ProjectionDeviations {
    double idempotence = 0.0;
    double consistency = 0.0;
    double positivity = 0.0;    // most negative eigenvalue, flipped
    double odd_moment = 0.0;
};

ProjectionDeviations projection_suite() {
    const ModelParams p{5, 6, 0.5, 0.4};
    const TwoBandModel m = build_model(p, 97);
    const BandPartition partition{{p.n1, p.n2}};
    const Eigen::MatrixXcd reference = env_projector(partition, 0) / p.n1;
    const int dim = 2 * partition.env_dim();
    std::mt19937_64 gen(29);

    ProjectionDeviations dev;
    for (int k = 0; k < 100; ++k) {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(dim, gen);

        const Eigen::MatrixXcd ps = project_standard(rho, reference);
        const Eigen::MatrixXcd pc = project_correlated(rho, partition);
        dev.idempotence = std::max(
            dev.idempotence, (project_standard(ps, reference) - ps).cwiseAbs().maxCoeff());
        dev.idempotence = std::max(
            dev.idempotence, (project_correlated(pc, partition) - pc).cwiseAbs().maxCoeff());
        dev.consistency = std::max(
            dev.consistency,
            (partial_trace_env(ps) - partial_trace_env(rho)).cwiseAbs().maxCoeff());
        dev.consistency = std::max(
            dev.consistency,
            (partial_trace_env(pc) - partial_trace_env(rho)).cwiseAbs().maxCoeff());

        const Eigen::MatrixXcd psd = oracle::random_density(dim, gen);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(project_correlated(psd, partition));
        dev.positivity = std::max(dev.positivity, -eig.eigenvalues().minCoeff());

        const double t = 0.9 * k / 100.0 + 0.1;
        const Eigen::MatrixXcd v = oracle::interaction(m, t);
        const Eigen::MatrixXcd l_std = -oracle::kI * (v * ps - ps * v);
        const Eigen::MatrixXcd l_corr = -oracle::kI * (v * pc - pc * v);
        dev.odd_moment =
            std::max(dev.odd_moment, project_standard(l_std, reference).cwiseAbs().maxCoeff());
        dev.odd_moment =
            std::max(dev.odd_moment, project_correlated(l_corr, partition).cwiseAbs().maxCoeff());
    }
    return dev;
}

} // namespace

int main() {
    std::printf("acceptance suite, fig2-scale ensemble first (a few minutes)\n");

    // Shared fig2 run: N1 = N2 = 500, band width 0.5, coupling 5e-4,
    // 10 realizations on [0, 5/(gamma1+gamma2)].
    ExperimentConfig fig2 = preset("fig2");
    fig2.methods = {Method::Exact,       Method::Tcl2Std,     Method::Tcl4Std,
                    Method::Ham,         Method::Ctcl2Markov, Method::Ctcl2Memory};
    const RateSet rates = golden_rule_rates(fig2.params, true);
    const ResultSet run = run_experiment(fig2);
    const MethodCurve& exact = *run.find(Method::Exact);
    const MethodCurve& ham = *run.find(Method::Ham);
    const double t_max = run.config.t_max;

    // 1. exact ensemble against HAM on the whole grid
    {
        double worst = 0.0;
        for (std::size_t s = 0; s < run.times.size(); ++s)
            worst = std::max(worst, std::abs(exact.rho11[s] - ham.rho11[s]));
        report(1, "fig2 reproduction, exact vs HAM",
               worst <= 0.03 && run.failures.empty(),
               "max |mean exact - HAM| = " + num(worst) + " (tol 3.000e-02), " +
                   std::to_string(fig2.realizations) + " realizations, t_max " + num(t_max));
    }

    // 2. the standard-TCL2 stationary state is wrong by the full weight
    {
        const double exact_final = exact.rho11.back();
        const DensityMatrix2 rho0 = upper_density();
        const double tcl2_grid_final = run.find(Method::Tcl2Std)->rho11.back();
        // Lindblad prediction relaxes to zero; certify on an extended horizon
        // (the analytic curve has no recurrence scale).
        const double tcl2_stationary = tcl2_standard(rates, rho0, 2.0 * t_max)(1, 1).real();
        const bool ok = std::abs(exact_final - 0.5) <= 0.05 && tcl2_stationary <= 0.01;
        report(2, "standard-TCL2 failure witness", ok,
               "exact final = " + num(exact_final) + " (want 0.5 +- 0.05); TCL2 at 2*t_max = " +
                   num(tcl2_stationary) + " <= 1.000e-02 (on-grid final " +
                   num(tcl2_grid_final) + ", limit 0)");
    }

    // 3. standard-TCL4 divergence and its closed-form minimum
    {
        const DensityMatrix2 rho0 = upper_density();
        const double at_4 = tcl4_standard(rates, rho0, 4.0 / rates.gamma1)(1, 1).real();
        const double at_min = tcl4_standard(rates, rho0, 1.0 / rates.gamma1)(1, 1).real();
        const double closed = std::exp(-rates.gamma2 / (2.0 * rates.gamma1));
        const bool ok = at_4 > 1.0 && std::abs(at_min - closed) <= 1e-12;
        report(3, "standard-TCL4 divergence", ok,
               "rho11(4/gamma1) = " + num(at_4) + " > 1; |min - closed form| = " +
                   num(std::abs(at_min - closed)) + " (tol 1.000e-12)");
    }

    // 4. correlated TCL2 (Markov) and HAM are the same equations
    {
        const MethodCurve& markov = *run.find(Method::Ctcl2Markov);
        double worst = 0.0;
        for (std::size_t s = 0; s < run.times.size(); ++s) {
            worst = std::max(worst, std::abs(markov.rho11[s] - ham.rho11[s]));
            worst = std::max(worst, std::abs(markov.rho01[s] - ham.rho01[s]));
        }
        report(4, "correlated TCL2 = HAM in the Markov limit", worst <= 1e-10,
               "max curve deviation = " + num(worst) + " (tol 1.000e-10)");
    }

    // 5. memory-kernel solution against the quadrature closed form
    {
        const Kernel sinc2{KernelKind::Sinc2, fig2.params.band_width};
        const MethodCurve& memory = *run.find(Method::Ctcl2Memory);
        double worst_ode = 0.0;
        for (std::size_t s = 0; s < run.times.size(); ++s) {
            const double big_gamma = memory_integral_gamma(sinc2, rates, run.times[s]);
            const double closed =
                (rates.gamma1 + rates.gamma2 * std::exp(-big_gamma)) / rates.total();
            worst_ode = std::max(worst_ode, std::abs(memory.rho11[s] - closed));
        }

        const Kernel expo{KernelKind::Exponential, fig2.params.band_width};
        double worst_quad = 0.0;
        for (const double t : {0.5, 5.0, 50.0, 500.0, 1591.0}) {
            const double exact_gamma =
                rates.total() *
                (t - (1.0 - std::exp(-fig2.params.band_width * t)) / fig2.params.band_width);
            const double quad = memory_integral_gamma(expo, rates, t);
            worst_quad = std::max(worst_quad, std::abs(quad - exact_gamma) / exact_gamma);
        }
        const bool ok = worst_ode <= 1e-6 && worst_quad <= 1e-8;
        report(5, "memory-kernel closed form", ok,
               "ODE vs quadrature closed form: " + num(worst_ode) +
                   " (tol 1.000e-06); exponential Gamma(t) rel err: " + num(worst_quad) +
                   " (tol 1.000e-08)");
    }

    // 6. fourth-order corrections
    {
        const FourthOrderRates& g = *rates.fourth_order;
        const double lhs = g.gamma_1 + g.gamma_2_tilde;
        const double rhs =
            rates.total() * (1.0 + rates.total() / (2.0 * fig2.params.band_width));
        const double rate_err = std::abs(lhs - rhs) / rhs;

        const double stat2 = rates.gamma1 / rates.total();
        const double stat4 = g.gamma_1 / (g.gamma_1 + g.gamma_2_tilde);
        const double stat_err = std::abs(stat4 - stat2);

        ExperimentConfig fig5 = preset("fig5");
        fig5.methods = {Method::Ctcl2Markov, Method::Ctcl4};
        const ResultSet run5 = run_experiment(fig5);
        const RateSet rates5 = golden_rule_rates(fig5.params);
        bool faster = true;
        const MethodCurve& c2 = *run5.find(Method::Ctcl2Markov);
        const MethodCurve& c4 = *run5.find(Method::Ctcl4);
        for (std::size_t s = 1; s < run5.times.size(); ++s)
            faster = faster && c4.rho11[s] < c2.rho11[s];

        const bool ok = rate_err <= 1e-14 && stat_err <= 1e-12 && faster;
        report(6, "fourth-order corrections", ok,
               "Gamma1+Gamma2~ identity rel err " + num(rate_err) +
                   "; stationary diff " + num(stat_err) +
                   " (tol 1.000e-12); fig5 (gamma/width = " +
                   num(rates5.gamma1 / fig5.params.band_width) +
                   ") ctcl4 strictly faster: " + (faster ? "yes" : "no"));
    }

    // 7. small-scale oracle equivalence and projection identities
    {
        const double prop_err = small_scale_propagation_error();
        const ProjectionDeviations dev = projection_suite();
        const bool ok = prop_err <= 1e-8 && dev.idempotence <= 1e-12 &&
                        dev.consistency <= 1e-12 && dev.positivity <= 1e-12 &&
                        dev.odd_moment <= 1e-12;
        report(7, "small-scale oracle equivalence", ok,
               "propagation vs dense oracle " + num(prop_err) +
                   " (tol 1.000e-08); projections: idempotence " + num(dev.idempotence) +
                   ", consistency " + num(dev.consistency) + ", positivity " +
                   num(dev.positivity) + ", odd moment " + num(dev.odd_moment) +
                   " (tol 1.000e-12)");
    }

    // 8. correlator suite
    {
        const ModelParams pf2{200, 200, 0.5, 1e-3};
        const RateSet rf2 = golden_rule_rates(pf2);
        const Kernel kernel{KernelKind::Sinc2, pf2.band_width};
        const int m_seeds = 100;
        std::vector<std::uint64_t> seeds;
        for (int k = 0; k < m_seeds; ++k) seeds.push_back(mix_seed(0xACC, k));
        const int points = 101;
        Eigen::VectorXd taus(points);
        for (int k = 0; k < points; ++k)
            taus[k] = 10.0 / pf2.band_width * k / (points - 1);
        const Eigen::VectorXcd f2 = empirical_two_point(pf2, seeds, taus);
        const double f2_bound = 5.0 * rf2.gamma2 * kernel_h(kernel, 0.0) /
                                std::sqrt(static_cast<double>(m_seeds) * pf2.n1);
        double f2_worst = 0.0;
        for (int k = 0; k < points; ++k)
            f2_worst = std::max(f2_worst,
                                std::abs(f2[k] - rf2.gamma2 * kernel_h(kernel, taus[k])));

        const ModelParams pf4{48, 24, 0.5, 1e-2};
        std::vector<std::uint64_t> seeds4;
        for (int k = 0; k < 160; ++k) seeds4.push_back(mix_seed(0xACC4, k));
        const double separation = 40.0 / pf4.band_width;
        const auto peak1 = empirical_four_point(pf4, seeds4, separation, separation, 0.0, 0.0);
        const auto peak2 = empirical_four_point(pf4, seeds4, separation, 0.0, 0.0, separation);
        const double ratio = peak2.real() / peak1.real();
        const double want_ratio = static_cast<double>(pf4.n1) / pf4.n2;
        const double ratio_err = std::abs(ratio - want_ratio) / want_ratio;

        const ModelParams pt{64, 32, 0.5, 5e-3};
        const RateSet rt = golden_rule_rates(pt);
        const double tau = 100.0 / pt.band_width;
        double f_up = 0.0, f_down = 0.0;
        for (int k = 0; k < 4; ++k) {
            f_up += transition_integral(pt, mix_seed(0x71, k), 1, 0, 1, 2, tau);
            f_down += transition_integral(pt, mix_seed(0x71, k), 0, 1, 2, 1, tau);
        }
        const double slope_up_err =
            std::abs(f_up / 4.0 / tau - pt.n2 * rt.gamma1) / (pt.n2 * rt.gamma1);
        const double slope_down_err =
            std::abs(f_down / 4.0 / tau - pt.n1 * rt.gamma2) / (pt.n1 * rt.gamma2);

        const bool ok = f2_worst <= f2_bound && ratio_err <= 0.1 && slope_up_err <= 0.1 &&
                        slope_down_err <= 0.1;
        report(8, "correlator suite", ok,
               "f2 worst dev " + num(f2_worst) + " (bound " + num(f2_bound) +
                   "); f4 peak ratio " + num(ratio) + " vs " + num(want_ratio) +
                   " (rel err " + num(ratio_err) + ", tol 0.1); transition slopes rel err " +
                   num(slope_up_err) + ", " + num(slope_down_err) + " (tol 0.1)");
    }

    // 9. conservation suite
    {
        const double norm_worst =
            *std::max_element(exact.norm_drift.begin(), exact.norm_drift.end());

        const Kernel kernel{KernelKind::Sinc2, fig2.params.band_width};
        DensityMatrix2 rho0 = DensityMatrix2::Zero();
        rho0(1, 1) = 0.8;
        rho0(0, 0) = 0.2;
        rho0(0, 1) = std::complex<double>(0.25, -0.2);
        rho0(1, 0) = std::conj(rho0(0, 1));
        const CorrelatedState state0{rho0, DensityMatrix2::Zero()};
        const TimeGrid grid{0.0, 5.0 / rates.total(), 101};
        double trace_worst = 0.0, invariant_worst = 0.0;
        auto scan = [&](const CorrelatedTrajectory& traj) {
            const double inv0 =
                traj.states.front().rho1(1, 1).real() + traj.states.front().rho2(0, 0).real();
            for (const auto& s : traj.states) {
                trace_worst = std::max(trace_worst,
                                       std::abs((s.rho1 + s.rho2).trace().real() - 1.0));
                invariant_worst = std::max(
                    invariant_worst,
                    std::abs(s.rho1(1, 1).real() + s.rho2(0, 0).real() - inv0));
            }
        };
        scan(correlated_tcl2(kernel, rates, state0, grid, CtclMode::Markov));
        scan(correlated_tcl2(kernel, rates, state0, grid, CtclMode::Memory));
        scan(correlated_tcl4_grid(rates, state0, grid));

        std::mt19937_64 gen(314);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        MultibandRates mb;
        mb.sys_dim = 2;
        mb.band_sizes = {2, 5, 9};
        mb.resize();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) {
                        if (mb.gamma(j, i, b, a) != 0.0) continue;
                        const double forward = 0.02 * uni(gen);
                        mb.gamma(i, j, a, b) = forward;
                        mb.gamma(j, i, b, a) = forward *
                                               mb.band_sizes[static_cast<std::size_t>(b)] /
                                               mb.band_sizes[static_cast<std::size_t>(a)];
                    }
        MultibandState b0;
        const std::vector<double> weights{0.5, 0.3, 0.2};
        for (int a = 0; a < 3; ++a)
            b0.b.push_back(weights[static_cast<std::size_t>(a)] *
                           oracle::random_density(2, gen).transpose());
        const MultibandTrajectory mb_traj = ham_multiband(mb, b0, {0.0, 400.0, 51});

        const bool ok = norm_worst <= 1e-9 && trace_worst <= 1e-10 &&
                        invariant_worst <= 1e-10 && mb_traj.population_drift <= 1e-10;
        report(9, "conservation suite", ok,
               "norm drift " + num(norm_worst) + " (tol 1.000e-09); solver trace " +
                   num(trace_worst) + ", cross-band invariant " + num(invariant_worst) +
                   ", multiband population " + num(mb_traj.population_drift) +
                   " (tol 1.000e-10)");
    }

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures;
}
