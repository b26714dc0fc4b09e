#include "bandspin/correlations.hpp"

#include <algorithm>
#include <cmath>

namespace bandspin {

namespace {

// Cumulative integral of uniformly sampled values (step s), one output per
// node. Interior intervals integrate the average of the two quadratics fit
// through the neighbouring triples; boundary intervals use the one available
// stencil. Exact for cubics on interior intervals.
template <typename Scalar>
std::vector<Scalar> cumulative_integral(const std::vector<Scalar>& y, double s) {
    const std::size_t n = y.size() - 1;   // interval count
    std::vector<Scalar> out(y.size(), Scalar{});
    if (n == 0) return out;
    if (n == 1) {
        out[1] = out[0] + s * 0.5 * (y[0] + y[1]);
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        Scalar piece;
        if (k == 0)
            piece = (s / 12.0) * (5.0 * y[0] + 8.0 * y[1] - y[2]);
        else if (k == n - 1)
            piece = (s / 12.0) * (-y[n - 2] + 8.0 * y[n - 1] + 5.0 * y[n]);
        else
            piece = (s / 24.0) * (-y[k - 1] + 13.0 * y[k] + 13.0 * y[k + 1] - y[k + 2]);
        out[k + 1] = out[k] + piece;
    }
    return out;
}

struct UniformGrid {
    double step = 0.0;
    int nodes = 0;   // count including both endpoints
};

UniformGrid make_grid(double t_end, double max_step, int min_intervals) {
    const double target = std::min(max_step, t_end / min_intervals);
    const int n = std::max(min_intervals, static_cast<int>(std::ceil(t_end / target - 1e-12)));
    return {t_end / n, n + 1};
}

// Phase vectors for the empirical correlators: u(i) = exp(+i·E1(i)·t),
// v(j) = exp(−i·E2(j)·t), so that exp(−i·ω(i,j)·t) = u(i)·v(j).
void band_phases(const ModelParams& p, double t, Eigen::VectorXcd& u, Eigen::VectorXcd& v) {
    for (int i = 0; i < p.n1; ++i)
        u[i] = std::polar(1.0, p.band_width * (i + 1) / p.n1 * t);
    for (int j = 0; j < p.n2; ++j)
        v[j] = std::polar(1.0, -p.band_width * (j + 1) / p.n2 * t);
}

// Σ_{ij} W(i,j)·u(i)·v(j) with real W, via two real mat-vec products.
std::complex<double> weighted_phase_sum(const Eigen::MatrixXd& w, const Eigen::VectorXcd& u,
                                        const Eigen::VectorXcd& v) {
    const Eigen::VectorXd wr = w * v.real().matrix();
    const Eigen::VectorXd wi = w * v.imag().matrix();
    std::complex<double> acc = 0.0;
    for (int i = 0; i < u.size(); ++i)
        acc += u[i] * std::complex<double>(wr[i], wi[i]);
    return acc;
}

Eigen::MatrixXcd phased_couplings(const Eigen::MatrixXcd& c, const ModelParams& p, double t) {
    Eigen::MatrixXcd m(p.n1, p.n2);
    for (int i = 0; i < p.n1; ++i)
        for (int j = 0; j < p.n2; ++j) {
            const double omega = p.band_width * ((j + 1.0) / p.n2 - (i + 1.0) / p.n1);
            m(i, j) = c(i, j) * std::polar(1.0, -omega * t);
        }
    return m;
}

void require_small_bands(const ModelParams& p, const char* where) {
    if (p.n1 > 64 || p.n2 > 64)
        throw ConfigError(std::string(where) + ": dense evaluation is limited to N1, N2 <= 64");
}

} // namespace

double kernel_h(const Kernel& kernel, double tau) {
    kernel.validate();
    const double de = kernel.band_width;
    switch (kernel.kind) {
        case KernelKind::Sinc2: {
            const double x = 0.5 * de * tau;
            if (x == 0.0) return de / (2.0 * M_PI);
            const double sinc = std::sin(x) / x;
            return de / (2.0 * M_PI) * sinc * sinc;
        }
        case KernelKind::Exponential:
            return 0.5 * de * std::exp(-de * std::abs(tau));
    }
    throw ConfigError("kernel_h: unknown kernel kind");
}

RateSet golden_rule_rates(const ModelParams& params, bool with_fourth_order) {
    params.validate();
    const double scale = 2.0 * M_PI * params.coupling * params.coupling / params.band_width;
    RateSet rates;
    rates.gamma1 = scale * params.n1;
    rates.gamma2 = scale * params.n2;
    if (with_fourth_order)
        rates.fourth_order = fourth_order_rates(rates.gamma1, rates.gamma2, params.band_width);
    return rates;
}

FourthOrderRates fourth_order_rates(double gamma1, double gamma2, double band_width) {
    if (!(band_width > 0.0))
        throw ConfigError("fourth_order_rates: band width must be positive");
    const double sum_corr = (gamma1 + gamma2) / (2.0 * band_width);
    FourthOrderRates r;
    r.gamma_1 = gamma1 * (1.0 + sum_corr);
    r.gamma_2 = gamma2 * (1.0 + (2.0 * gamma2 - gamma1) / (4.0 * band_width));
    r.gamma_3 = 3.0 * gamma1 * gamma2 / (4.0 * band_width);
    r.gamma_1_tilde = gamma1 * (1.0 + (2.0 * gamma1 - gamma2) / (4.0 * band_width));
    r.gamma_2_tilde = gamma2 * (1.0 + sum_corr);
    r.gamma_3_tilde = r.gamma_3;
    return r;
}

double memory_integral_gamma(const Kernel& kernel, const RateSet& rates, double t) {
    kernel.validate();
    if (t < 0.0) throw ConfigError("memory_integral_gamma: t must be >= 0");
    if (t == 0.0) return 0.0;

    const UniformGrid grid = make_grid(t, 0.01 / kernel.band_width, 64);
    std::vector<double> h(static_cast<std::size_t>(grid.nodes));
    for (int k = 0; k < grid.nodes; ++k)
        h[static_cast<std::size_t>(k)] = kernel_h(kernel, grid.step * k);
    const std::vector<double> big_h = cumulative_integral(h, grid.step);
    const std::vector<double> iterated = cumulative_integral(big_h, grid.step);
    return 2.0 * rates.total() * iterated.back();
}

KernelIntegralTable::KernelIntegralTable(const Kernel& kernel, double t_end, double step) {
    kernel.validate();
    if (!(t_end > 0.0) || !(step > 0.0))
        throw ConfigError("kernel table: t_end and step must be positive");
    const int n = std::max(2, static_cast<int>(std::ceil(t_end / step - 1e-9)));
    step_ = step;
    std::vector<double> h(static_cast<std::size_t>(n + 1));
    for (int k = 0; k <= n; ++k)
        h[static_cast<std::size_t>(k)] = kernel_h(kernel, step * k);
    values_ = cumulative_integral(h, step);
}

double KernelIntegralTable::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    const double pos = t / step_;
    const auto last = static_cast<double>(values_.size() - 1);
    if (pos >= last) return values_.back();
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return values_[k] + frac * (values_[k + 1] - values_[k]);
}

Eigen::VectorXcd empirical_two_point(const ModelParams& params,
                                     const std::vector<std::uint64_t>& seeds,
                                     const Eigen::VectorXd& tau_grid) {
    params.validate();
    if (seeds.empty()) throw ConfigError("empirical_two_point: at least one seed required");

    // f2 is linear in |c|², so averaging the weights over seeds first is
    // exact and avoids re-scanning the grid per realization.
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(params.n1, params.n2);
    for (const auto seed : seeds)
        w += sample_couplings(params.n1, params.n2, seed).entries.cwiseAbs2();
    w /= static_cast<double>(seeds.size());

    const double scale = params.coupling * params.coupling / params.n1;
    Eigen::VectorXcd u(params.n1), v(params.n2);
    Eigen::VectorXcd f2(tau_grid.size());
    for (int k = 0; k < tau_grid.size(); ++k) {
        band_phases(params, tau_grid[k], u, v);
        f2[k] = scale * weighted_phase_sum(w, u, v);
    }
    return f2;
}

std::complex<double> empirical_four_point(const ModelParams& params,
                                          const std::vector<std::uint64_t>& seeds,
                                          double t, double t1, double t2, double t3) {
    params.validate();
    require_small_bands(params, "empirical_four_point");
    if (seeds.empty()) throw ConfigError("empirical_four_point: at least one seed required");

    const double l2 = params.coupling * params.coupling;
    std::complex<double> acc = 0.0;
    for (const auto seed : seeds) {
        const Eigen::MatrixXcd c = sample_couplings(params.n1, params.n2, seed).entries;
        const Eigen::MatrixXcd m_t = phased_couplings(c, params, t);
        const Eigen::MatrixXcd m_t1 = phased_couplings(c, params, t1);
        const Eigen::MatrixXcd m_t2 = phased_couplings(c, params, t2);
        const Eigen::MatrixXcd m_t3 = phased_couplings(c, params, t3);
        const Eigen::MatrixXcd left = m_t * m_t1.adjoint();
        const Eigen::MatrixXcd right = m_t2 * m_t3.adjoint();
        acc += (left.cwiseProduct(right.transpose())).sum();
    }
    return acc * (l2 * l2 / params.n1) / static_cast<double>(seeds.size());
}

double transition_integral(const ModelParams& params, std::uint64_t seed,
                           int i, int j, int band_a, int band_b, double tau) {
    params.validate();
    require_small_bands(params, "transition_integral");
    if (i < 0 || i > 1 || j < 0 || j > 1)
        throw ConfigError("transition_integral: system indices must be 0 or 1");
    if (band_a < 1 || band_a > 2 || band_b < 1 || band_b > 2)
        throw ConfigError("transition_integral: band indices must be 1 or 2");
    if (tau < 0.0) throw ConfigError("transition_integral: tau must be >= 0");
    if (tau == 0.0) return 0.0;

    // <i|V|i> = 0 for the block-off-diagonal interaction, and the band
    // projectors kill every combination except (i=1,j=0,a=1,b=2) with
    // g(s) = tr{B(s)B†(0)} and its adjoint partner (i=0,j=1,a=2,b=1).
    if (i == j) return 0.0;
    double sign;
    if (i == 1 && j == 0 && band_a == 1 && band_b == 2)
        sign = -1.0;   // g(s) = λ²·Σ|c|²·exp(−iωs)
    else if (i == 0 && j == 1 && band_a == 2 && band_b == 1)
        sign = +1.0;   // g(s) = λ²·Σ|c|²·exp(+iωs)
    else
        return 0.0;

    const Eigen::MatrixXd w =
        sample_couplings(params.n1, params.n2, seed).entries.cwiseAbs2();
    const double l2 = params.coupling * params.coupling;

    const UniformGrid grid = make_grid(tau, 0.02 / params.band_width, 64);
    Eigen::VectorXcd u(params.n1), v(params.n2);
    std::vector<std::complex<double>> g(static_cast<std::size_t>(grid.nodes));
    std::vector<std::complex<double>> sg(static_cast<std::size_t>(grid.nodes));
    for (int k = 0; k < grid.nodes; ++k) {
        const double s = grid.step * k;
        band_phases(params, -sign * s, u, v);
        const std::complex<double> gk = l2 * weighted_phase_sum(w, u, v);
        g[static_cast<std::size_t>(k)] = gk;
        sg[static_cast<std::size_t>(k)] = s * gk;
    }
    const auto int_g = cumulative_integral(g, grid.step);
    const auto int_sg = cumulative_integral(sg, grid.step);
    return 2.0 * std::real(tau * int_g.back() - int_sg.back());
}

} // namespace bandspin
