#include "doctest.h"

#include <cmath>
#include <random>

#include "bandspin/model.hpp"
#include "bandspin/projections.hpp"

#include "oracles.hpp"

using namespace bandspin;

namespace {

const BandPartition kPartition{{3, 5}};

Eigen::MatrixXcd lower_band_reference(const BandPartition& partition) {
    return env_projector(partition, 0) / partition.band_sizes[0];
}

// B_ija = tr{B̂_ija ρ} = (tr_E{Π_a ρ})(j, i), one 2x2 matrix per band.
std::vector<Eigen::Matrix2cd> expectations_of(const Eigen::MatrixXcd& rho,
                                              const BandPartition& partition) {
    std::vector<Eigen::Matrix2cd> b;
    for (int a = 0; a < partition.band_count(); ++a)
        b.push_back(band_trace(rho, partition, a).transpose());
    return b;
}

} // namespace

TEST_CASE("standard projection: fixed point, idempotence, consistency") {
    const int de = kPartition.env_dim();
    const Eigen::MatrixXcd ref = lower_band_reference(kPartition);
    std::mt19937_64 gen(11);

    SUBCASE("product states in the range are fixed points") {
        const Eigen::Matrix2cd rho_s = oracle::random_density(2, gen);
        const Eigen::MatrixXcd rho = kron_sys_env(rho_s, ref);
        CHECK((project_standard(rho, ref) - rho).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("P^2 = P and tr_E is preserved on random Hermitian inputs") {
        for (int k = 0; k < 100; ++k) {
            const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
            const Eigen::MatrixXcd once = project_standard(rho, ref);
            const Eigen::MatrixXcd twice = project_standard(once, ref);
            CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-13);
            CHECK((partial_trace_env(once) - partial_trace_env(rho)).cwiseAbs().maxCoeff() <
                  1e-13);
        }
    }

    SUBCASE("dimension and reference validation") {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
        CHECK_THROWS_AS(project_standard(rho, Eigen::MatrixXcd::Identity(de + 1, de + 1)),
                        ConfigError);
        CHECK_THROWS_AS(project_standard(rho, Eigen::MatrixXcd::Identity(de, de)),
                        ConfigError);   // trace != 1
    }
}

TEST_CASE("correlated projection: idempotence, trace, positivity, structure") {
    const int de = kPartition.env_dim();
    std::mt19937_64 gen(13);

    SUBCASE("range members are fixed points") {
        const Eigen::Matrix2cd r1 = oracle::random_density(2, gen);
        const Eigen::Matrix2cd r2 = oracle::random_density(2, gen);
        Eigen::MatrixXcd rho = kron_sys_env(r1, env_projector(kPartition, 0) / 3.0) +
                               kron_sys_env(r2, env_projector(kPartition, 1) / 5.0);
        rho /= rho.trace().real();
        CHECK((project_correlated(rho, kPartition) - rho).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("P^2 = P, total trace preserved, tr_E preserved") {
        for (int k = 0; k < 100; ++k) {
            const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
            const Eigen::MatrixXcd once = project_correlated(rho, kPartition);
            const Eigen::MatrixXcd twice = project_correlated(once, kPartition);
            CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-13);
            CHECK(std::abs(once.trace() - rho.trace()) < 1e-13);
            CHECK((partial_trace_env(once) - partial_trace_env(rho)).cwiseAbs().maxCoeff() <
                  1e-13);
        }
    }

    SUBCASE("positive inputs stay positive") {
        for (int k = 0; k < 25; ++k) {
            const Eigen::MatrixXcd rho = oracle::random_density(2 * de, gen);
            const Eigen::MatrixXcd projected = project_correlated(rho, kPartition);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(projected);
            CHECK(eig.eigenvalues().minCoeff() > -1e-12);
        }
    }

    SUBCASE("output is diagonal in the environment, with no cross-band blocks") {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
        const Eigen::MatrixXcd projected = project_correlated(rho, kPartition);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int e = 0; e < de; ++e)
                    for (int f = 0; f < de; ++f)
                        if (e != f)
                            CHECK(std::abs(projected(i * de + e, j * de + f)) == 0.0);
    }

    SUBCASE("dimension mismatch is rejected") {
        CHECK_THROWS_AS(project_correlated(Eigen::MatrixXcd::Identity(9, 9), kPartition),
                        ConfigError);
    }
}

TEST_CASE("Hilbert space average state") {
    const int de = kPartition.env_dim();
    std::mt19937_64 gen(17);

    SUBCASE("reproduces its defining expectations") {
        const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
        const auto b = expectations_of(rho, kPartition);
        const Eigen::MatrixXcd alpha = ham_average_state(b, kPartition);
        const auto b_alpha = expectations_of(alpha, kPartition);
        for (int a = 0; a < 2; ++a)
            CHECK((b_alpha[a] - b[a]).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("upper level with uniform lower-band occupation") {
        std::vector<Eigen::Matrix2cd> b(2, Eigen::Matrix2cd::Zero());
        b[0](1, 1) = 1.0;   // B_111 = 1
        const Eigen::MatrixXcd alpha = ham_average_state(b, kPartition);
        Eigen::Matrix2cd upper = Eigen::Matrix2cd::Zero();
        upper(1, 1) = 1.0;
        const Eigen::MatrixXcd expected =
            kron_sys_env(upper, env_projector(kPartition, 0) / kPartition.band_sizes[0]);
        CHECK((alpha - expected).cwiseAbs().maxCoeff() < 1e-14);
    }

    SUBCASE("agrees with the correlated projection of any compatible state") {
        for (int k = 0; k < 20; ++k) {
            const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * de, gen);
            const Eigen::MatrixXcd alpha = ham_average_state(expectations_of(rho, kPartition),
                                                             kPartition);
            CHECK((alpha - project_correlated(rho, kPartition)).cwiseAbs().maxCoeff() < 1e-13);
        }
    }

    SUBCASE("inconsistent expectation sets are rejected") {
        std::vector<Eigen::Matrix2cd> b(2, Eigen::Matrix2cd::Zero());
        b[0](0, 0) = std::complex<double>(0.0, 0.4);
        CHECK_THROWS_AS(ham_average_state(b, kPartition), ConfigError);

        b[0] = Eigen::Matrix2cd::Zero();
        b[0](0, 1) = 0.3;
        b[0](1, 0) = 0.1;   // not the conjugate
        CHECK_THROWS_AS(ham_average_state(b, kPartition), ConfigError);

        CHECK_THROWS_AS(ham_average_state({Eigen::Matrix2cd::Zero()}, kPartition),
                        ConfigError);
    }
}

TEST_CASE("odd-moment condition: P L(t) P = 0 for both projections") {
    const ModelParams p{3, 5, 0.7, 0.4};
    const TwoBandModel m = build_model(p, 19);
    const BandPartition partition{{p.n1, p.n2}};
    const Eigen::MatrixXcd ref = lower_band_reference(partition);
    std::mt19937_64 gen(23);

    for (const double t : {0.0, 0.9, 7.3}) {
        const Eigen::MatrixXcd v = oracle::interaction(m, t);
        for (int k = 0; k < 10; ++k) {
            const Eigen::MatrixXcd rho = oracle::random_hermitian(2 * partition.env_dim(), gen);

            const Eigen::MatrixXcd in_std = project_standard(rho, ref);
            const Eigen::MatrixXcd l_std =
                -oracle::kI * (v * in_std - in_std * v);
            CHECK(project_standard(l_std, ref).cwiseAbs().maxCoeff() < 1e-12);

            const Eigen::MatrixXcd in_corr = project_correlated(rho, partition);
            const Eigen::MatrixXcd l_corr =
                -oracle::kI * (v * in_corr - in_corr * v);
            CHECK(project_correlated(l_corr, partition).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}
