// correlations.hpp — Environmental correlation kernels, Golden-Rule rates,
// the memory integral Γ(t), and empirical correlators measured from sampled
// coupling matrices.
//
// Normalization convention, encoded once and tested everywhere: the
// one-sided kernel integral ∫₀^∞ h(τ) dτ equals 1/2 for both kernel kinds,
// which is what makes the Markov limit of the memory equations reproduce the
// Golden-Rule rates without stray factors of 2.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bandspin/errors.hpp"
#include "bandspin/model.hpp"

namespace bandspin {

enum class KernelKind { Sinc2, Exponential };

struct Kernel {
    KernelKind kind = KernelKind::Sinc2;
    double band_width = 0.0;   // δε

    void validate() const {
        if (!(band_width > 0.0)) throw ConfigError("kernel: band width must be positive");
    }
};

// Sinc2:       h(τ) = (δε/2π)·sin²(δε·τ/2)/(δε·τ/2)², h(0) = δε/2π.
// Exponential: h(τ) = (δε/2)·exp(−δε·|τ|).
double kernel_h(const Kernel& kernel, double tau);

// Fourth-order relaxation rates of the correlated expansion, derived with the
// exponential kernel:
//   Γ1 = γ1[1 + (γ1+γ2)/2δε]   Γ̃1 = γ1[1 + (2γ1−γ2)/4δε]
//   Γ2 = γ2[1 + (2γ2−γ1)/4δε]  Γ̃2 = γ2[1 + (γ1+γ2)/2δε]
//   Γ3 = Γ̃3 = 3γ1γ2/4δε
struct FourthOrderRates {
    double gamma_1 = 0.0;
    double gamma_2 = 0.0;
    double gamma_3 = 0.0;
    double gamma_1_tilde = 0.0;
    double gamma_2_tilde = 0.0;
    double gamma_3_tilde = 0.0;
};

struct RateSet {
    double gamma1 = 0.0;   // 2πλ²N1/δε
    double gamma2 = 0.0;   // 2πλ²N2/δε
    std::optional<FourthOrderRates> fourth_order;

    double total() const { return gamma1 + gamma2; }
};

RateSet golden_rule_rates(const ModelParams& params, bool with_fourth_order = false);
FourthOrderRates fourth_order_rates(double gamma1, double gamma2, double band_width);

// Γ(t) = 2(γ1+γ2)·∫₀ᵗ dt1 ∫₀^{t1} dt2 h(t1−t2), by cumulative quadrature.
// Exponential kernel closed form: (γ1+γ2)[t − (1−e^{−δεt})/δε].
double memory_integral_gamma(const Kernel& kernel, const RateSet& rates, double t);

// Tabulated one-sided integral H(t) = ∫₀ᵗ h(τ) dτ on a uniform grid, so ODE
// stage times can be made to land exactly on nodes. H(∞) = 1/2.
class KernelIntegralTable {
public:
    KernelIntegralTable(const Kernel& kernel, double t_end, double step);

    double step() const { return step_; }
    double t_end() const { return step_ * static_cast<double>(values_.size() - 1); }

    // Linear interpolation between nodes; node queries are exact.
    double operator()(double t) const;

private:
    double step_ = 0.0;
    std::vector<double> values_;
};

// Seed-averaged two-point correlator
//   f2(τ) = (λ²/N1)·Σ_{n1,n2} |c(n1,n2)|²·exp(−i·ω(n1,n2)·τ),
// which converges to γ2·h(τ) for N1 = N2 ensembles.
Eigen::VectorXcd empirical_two_point(const ModelParams& params,
                                     const std::vector<std::uint64_t>& seeds,
                                     const Eigen::VectorXd& tau_grid);

// Seed average of tr_E{B(t)B†(t1)B(t2)B†(t3)·Π1/N1}, evaluated densely per
// realization. Small bands only (N1, N2 <= 64).
std::complex<double> empirical_four_point(const ModelParams& params,
                                          const std::vector<std::uint64_t>& seeds,
                                          double t, double t1, double t2, double t3);

// Twice-integrated band-resolved transition correlator
//   f(ijab,τ) = 2·Re ∫₀^τ dτ' ∫₀^{τ'} dτ'' tr{Π_a <i|V(τ'')|j> Π_b <j|V(0)|i>}
// for one realization; slope approaches N_b·γ(ijab) for τ·δε >> 1. System
// indices i,j are 0/1, band indices a,b are 1/2. Small bands only.
double transition_integral(const ModelParams& params, std::uint64_t seed,
                           int i, int j, int band_a, int band_b, double tau);

} // namespace bandspin
