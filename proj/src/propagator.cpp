#include "bandspin/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace bandspin {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr std::complex<double> kImagUnit{0.0, 1.0};

void fill_phases(const TwoBandModel& model, double t, VectorXcd& d1, VectorXcd& d2) {
    const auto& e1 = model.lower_energies;
    const auto& e2 = model.upper_energies;
    for (int i = 0; i < e1.size(); ++i) d1[i] = std::polar(1.0, e1[i] * t);
    for (int j = 0; j < e2.size(); ++j) d2[j] = std::polar(1.0, -e2[j] * t);
}

// Bright-sector propagation: a = amplitudes of |1,n1>, b = amplitudes of
// |0,n2>. With B(t) = λ·diag(d1)·C·diag(d2) the equations of motion are
// da/dt = −i·B(t)·b and db/dt = −i·B†(t)·a; the dark amplitudes are frozen.
class SectorStepper {
public:
    explicit SectorStepper(const TwoBandModel& model)
        : model_(model),
          lambda_(model.params.coupling),
          c_(model.couplings.entries),
          d1_(model.params.n1), d2_(model.params.n2),
          t1_(model.params.n1), t2_(model.params.n2),
          k1a_(model.params.n1), k2a_(model.params.n1), k3a_(model.params.n1), k4a_(model.params.n1),
          k1b_(model.params.n2), k2b_(model.params.n2), k3b_(model.params.n2), k4b_(model.params.n2),
          wa_(model.params.n1), wb_(model.params.n2) {}

    void step(VectorXcd& a, VectorXcd& b, double t, double h) {
        fill_phases(model_, t, d1_, d2_);
        deriv(a, b, k1a_, k1b_);

        fill_phases(model_, t + 0.5 * h, d1_, d2_);
        wa_ = a + (0.5 * h) * k1a_; wb_ = b + (0.5 * h) * k1b_;
        deriv(wa_, wb_, k2a_, k2b_);
        wa_ = a + (0.5 * h) * k2a_; wb_ = b + (0.5 * h) * k2b_;
        deriv(wa_, wb_, k3a_, k3b_);

        fill_phases(model_, t + h, d1_, d2_);
        wa_ = a + h * k3a_; wb_ = b + h * k3b_;
        deriv(wa_, wb_, k4a_, k4b_);

        a += (h / 6.0) * (k1a_ + 2.0 * k2a_ + 2.0 * k3a_ + k4a_);
        b += (h / 6.0) * (k1b_ + 2.0 * k2b_ + 2.0 * k3b_ + k4b_);
    }

private:
    void deriv(const VectorXcd& a, const VectorXcd& b, VectorXcd& da, VectorXcd& db) {
        t2_ = d2_.cwiseProduct(b);
        da.noalias() = c_ * t2_;
        da = (-kImagUnit * lambda_) * d1_.cwiseProduct(da);

        t1_ = d1_.conjugate().cwiseProduct(a);
        db.noalias() = c_.adjoint() * t1_;
        db = (-kImagUnit * lambda_) * d2_.conjugate().cwiseProduct(db);
    }

    const TwoBandModel& model_;
    double lambda_;
    const MatrixXcd& c_;
    VectorXcd d1_, d2_, t1_, t2_;
    VectorXcd k1a_, k2a_, k3a_, k4a_, k1b_, k2b_, k3b_, k4b_;
    VectorXcd wa_, wb_;
};

// Full composite-space stepper; builds V(t) densely per stage. Small models
// only — used for cross-checks against the sector fast path.
class DenseStepper {
public:
    explicit DenseStepper(const TwoBandModel& model) : model_(model) {
        const Eigen::Index dim = 2 * model.env_dim();
        k1_.resize(dim); k2_.resize(dim); k3_.resize(dim); k4_.resize(dim);
        w_.resize(dim);
    }

    void step(VectorXcd& y, double t, double h) {
        v_ = dense_interaction(model_, t);
        k1_.noalias() = -kImagUnit * (v_ * y);

        v_ = dense_interaction(model_, t + 0.5 * h);
        w_ = y + (0.5 * h) * k1_;
        k2_.noalias() = -kImagUnit * (v_ * w_);
        w_ = y + (0.5 * h) * k2_;
        k3_.noalias() = -kImagUnit * (v_ * w_);

        v_ = dense_interaction(model_, t + h);
        w_ = y + h * k3_;
        k4_.noalias() = -kImagUnit * (v_ * w_);

        y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    const TwoBandModel& model_;
    MatrixXcd v_;
    VectorXcd k1_, k2_, k3_, k4_, w_;
};

TrajectoryRecord make_record(const TwoBandModel& model, const PureState& psi, double norm) {
    TrajectoryRecord rec;
    rec.cond = conditional_densities(model, psi);
    rec.rho = rec.cond.reduced();
    rec.norm = norm;
    rec.band_population = {rec.cond.rho1.trace().real(), rec.cond.rho2.trace().real()};
    return rec;
}

} // namespace

PureState product_state(const Eigen::Vector2cd& sys, const Eigen::VectorXcd& env) {
    PureState psi;
    psi.amplitudes.resize(2 * env.size());
    psi.amplitudes.head(env.size()) = sys[0] * env;
    psi.amplitudes.tail(env.size()) = sys[1] * env;
    return psi;
}

double default_time_step(const TwoBandModel& model) {
    const double phase_step = 0.05 / model.params.band_width;
    const double vhat = model.params.coupling *
                        (std::sqrt(model.params.n1) + std::sqrt(model.params.n2));
    if (vhat <= 0.0) return phase_step;
    return std::min(phase_step, 0.1 / vhat);
}

double recurrence_guard_time(const TwoBandModel& model) {
    const int nmin = std::min(model.params.n1, model.params.n2);
    return 0.5 * (2.0 * M_PI * nmin / model.params.band_width);
}

Trajectory evolve(const TwoBandModel& model, const PureState& psi0, const TimeGrid& grid,
                  const IntegratorOptions& opts) {
    model.params.validate();
    grid.validate();
    const int ne = model.env_dim();
    if (psi0.amplitudes.size() != 2 * ne)
        throw ConfigError("evolve: state dimension does not match the model");
    const double norm0 = psi0.amplitudes.norm();
    if (std::abs(norm0 - 1.0) > 1e-9)
        throw ConfigError("evolve: initial state must have unit norm");
    if (opts.full_space && ne > 2048)
        throw ConfigError("evolve: full-space mode is limited to N1+N2 <= 2048");

    const double spacing = grid.spacing();
    double dt;
    if (opts.dt > 0.0) {
        if (opts.dt > spacing * (1.0 + 1e-12))
            throw ConfigError("evolve: requested step exceeds the grid sample spacing");
        dt = opts.dt;
    } else {
        dt = std::min(default_time_step(model), spacing);
    }
    const int steps_per_interval = std::max(1, static_cast<int>(std::ceil(spacing / dt - 1e-12)));
    const double h = spacing / steps_per_interval;

    Trajectory traj;
    traj.method = "exact";
    traj.params = model.params;
    traj.coupling_seed = model.couplings.seed;
    traj.times = grid.times();
    traj.records.reserve(traj.times.size());
    if (grid.t_end > recurrence_guard_time(model)) {
        traj.recurrence_warning = true;
        std::fprintf(stderr,
                     "warning: t_end %.6g exceeds the recurrence guard %.6g; "
                     "continuum-kernel predictions stop applying there\n",
                     grid.t_end, recurrence_guard_time(model));
    }

    PureState psi = psi0;
    auto check_drift = [&](double norm) {
        const double drift = std::abs(norm - norm0);
        traj.max_norm_drift = std::max(traj.max_norm_drift, drift);
        if (drift > opts.norm_tolerance)
            throw AccuracyError("evolve: norm drift " + std::to_string(drift) +
                                " exceeds tolerance " + std::to_string(opts.norm_tolerance) +
                                "; reduce the time step");
    };

    if (opts.full_space) {
        DenseStepper stepper(model);
        traj.records.push_back(make_record(model, psi, norm0));
        double t = grid.t_start;
        for (std::size_t s = 1; s < traj.times.size(); ++s) {
            for (int k = 0; k < steps_per_interval; ++k) {
                stepper.step(psi.amplitudes, t, h);
                t += h;
                check_drift(psi.amplitudes.norm());
            }
            t = traj.times[s];   // re-anchor to the sample time
            traj.records.push_back(make_record(model, psi, psi.amplitudes.norm()));
        }
        return traj;
    }

    // Sector-restricted path: split off the bright amplitudes, freeze the rest.
    const int n1 = model.params.n1;
    const int n2 = model.params.n2;
    VectorXcd a = psi.amplitudes.segment(ne, n1);        // |1,n1>
    VectorXcd b = psi.amplitudes.segment(n1, n2);        // |0,n2>
    const double dark2 = psi.amplitudes.head(n1).squaredNorm() +
                         psi.amplitudes.tail(n2).squaredNorm();

    SectorStepper stepper(model);
    traj.records.push_back(make_record(model, psi, norm0));
    double t = grid.t_start;
    for (std::size_t s = 1; s < traj.times.size(); ++s) {
        for (int k = 0; k < steps_per_interval; ++k) {
            stepper.step(a, b, t, h);
            t += h;
            check_drift(std::sqrt(a.squaredNorm() + b.squaredNorm() + dark2));
        }
        t = traj.times[s];
        psi.amplitudes.segment(ne, n1) = a;
        psi.amplitudes.segment(n1, n2) = b;
        traj.records.push_back(make_record(model, psi, std::sqrt(a.squaredNorm() + b.squaredNorm() + dark2)));
    }
    return traj;
}

DensityMatrix2 reduced_density(const TwoBandModel& model, const PureState& psi) {
    const int ne = model.env_dim();
    if (psi.amplitudes.size() != 2 * ne)
        throw ConfigError("reduced_density: state dimension does not match the model");
    DensityMatrix2 rho;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            rho(i, j) = psi.amplitudes.segment(j * ne, ne).dot(psi.amplitudes.segment(i * ne, ne));
    return rho;
}

ConditionalDensities conditional_densities(const TwoBandModel& model, const PureState& psi) {
    const int ne = model.env_dim();
    if (psi.amplitudes.size() != 2 * ne)
        throw ConfigError("conditional_densities: state dimension does not match the model");
    const int n1 = model.params.n1;
    const int n2 = model.params.n2;
    ConditionalDensities cd;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            cd.rho1(i, j) = psi.amplitudes.segment(j * ne, n1).dot(psi.amplitudes.segment(i * ne, n1));
            cd.rho2(i, j) = psi.amplitudes.segment(j * ne + n1, n2).dot(psi.amplitudes.segment(i * ne + n1, n2));
        }
    return cd;
}

RelevantSet relevant_expectations(const TwoBandModel& model, const PureState& psi) {
    const ConditionalDensities cd = conditional_densities(model, psi);
    RelevantSet rs;
    rs.b[0] = cd.rho1.transpose();
    rs.b[1] = cd.rho2.transpose();
    return rs;
}

Eigen::MatrixXcd dense_interaction(const TwoBandModel& model, double t) {
    const int ne = model.env_dim();
    if (ne > 2048)
        throw ConfigError("dense_interaction: limited to N1+N2 <= 2048");
    const int n1 = model.params.n1;
    const int n2 = model.params.n2;
    const Eigen::MatrixXcd b = interaction_coupling(model, t);

    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(2 * ne, 2 * ne);
    // σ₊⊗B maps |0,n2> to |1,n1>; σ₋⊗B† is its adjoint.
    v.block(ne, n1, n1, n2) = b;
    v.block(n1, ne, n2, n1) = b.adjoint();
    return v;
}

} // namespace bandspin
