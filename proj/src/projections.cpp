#include "bandspin/projections.hpp"

#include <cmath>
#include <stdexcept>

namespace bandspin {

namespace {

void require_total_density_shape(const Eigen::MatrixXcd& rho, int env_dim, const char* where) {
    if (rho.rows() != rho.cols() || rho.rows() != 2 * env_dim)
        throw ConfigError(std::string(where) + ": density matrix dimension mismatch");
}

} // namespace

Eigen::MatrixXcd kron_sys_env(const Eigen::Matrix2cd& sys, const Eigen::MatrixXcd& env) {
    const Eigen::Index de = env.rows();
    Eigen::MatrixXcd out(2 * de, 2 * de);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out.block(i * de, j * de, de, de) = sys(i, j) * env;
    return out;
}

Eigen::MatrixXcd env_projector(const BandPartition& partition, int a) {
    partition.validate();
    if (a < 0 || a >= partition.band_count())
        throw ConfigError("env_projector: band index out of range");
    Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(partition.env_dim(), partition.env_dim());
    const int off = partition.offset(a);
    for (int e = 0; e < partition.band_sizes[static_cast<std::size_t>(a)]; ++e)
        pi(off + e, off + e) = 1.0;
    return pi;
}

Eigen::Matrix2cd partial_trace_env(const Eigen::MatrixXcd& rho) {
    if (rho.rows() != rho.cols() || rho.rows() % 2 != 0)
        throw ConfigError("partial_trace_env: density matrix dimension mismatch");
    const Eigen::Index de = rho.rows() / 2;
    Eigen::Matrix2cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho.block(i * de, j * de, de, de).trace();
    return out;
}

Eigen::Matrix2cd band_trace(const Eigen::MatrixXcd& rho, const BandPartition& partition, int a) {
    partition.validate();
    const int de = partition.env_dim();
    require_total_density_shape(rho, de, "band_trace");
    if (a < 0 || a >= partition.band_count())
        throw ConfigError("band_trace: band index out of range");
    const int off = partition.offset(a);
    const int na = partition.band_sizes[static_cast<std::size_t>(a)];
    Eigen::Matrix2cd out;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            out(i, j) = rho.block(i * de + off, j * de + off, na, na).trace();
    return out;
}

Eigen::MatrixXcd project_standard(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& reference) {
    if (reference.rows() != reference.cols())
        throw ConfigError("project_standard: reference state must be square");
    const Eigen::Index de = reference.rows();
    require_total_density_shape(rho, static_cast<int>(de), "project_standard");
    if ((reference - reference.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw ConfigError("project_standard: reference state must be Hermitian");
    if (std::abs(reference.trace() - std::complex<double>(1.0)) > 1e-12)
        throw ConfigError("project_standard: reference state must have unit trace");
    return kron_sys_env(partial_trace_env(rho), reference);
}

Eigen::MatrixXcd project_correlated(const Eigen::MatrixXcd& rho, const BandPartition& partition) {
    partition.validate();
    const int de = partition.env_dim();
    require_total_density_shape(rho, de, "project_correlated");

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * de, 2 * de);
    for (int a = 0; a < partition.band_count(); ++a) {
        const Eigen::Matrix2cd rho_a = band_trace(rho, partition, a);
        const int off = partition.offset(a);
        const int na = partition.band_sizes[static_cast<std::size_t>(a)];
        const double w = 1.0 / na;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int e = 0; e < na; ++e)
                    out(i * de + off + e, j * de + off + e) = rho_a(i, j) * w;
    }
    return out;
}

Eigen::MatrixXcd ham_average_state(const std::vector<Eigen::Matrix2cd>& b_values,
                                   const BandPartition& partition) {
    partition.validate();
    const int nb = partition.band_count();
    if (static_cast<int>(b_values.size()) != nb)
        throw ConfigError("ham_average_state: one B-matrix per band required");
    for (const auto& b : b_values) {
        if (std::abs(b(0, 0).imag()) > 1e-10 || std::abs(b(1, 1).imag()) > 1e-10)
            throw ConfigError("ham_average_state: diagonal expectations must be real");
        if (std::abs(b(0, 1) - std::conj(b(1, 0))) > 1e-10)
            throw ConfigError("ham_average_state: need B_ija = conj(B_jia)");
    }

    const int de = partition.env_dim();

    // Closed form: alpha = Σ_ija (B_jia / N_a) |i><j| ⊗ Π_a.
    Eigen::MatrixXcd alpha = Eigen::MatrixXcd::Zero(2 * de, 2 * de);
    for (int a = 0; a < nb; ++a) {
        const int off = partition.offset(a);
        const int na = partition.band_sizes[static_cast<std::size_t>(a)];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const std::complex<double> w = b_values[static_cast<std::size_t>(a)](j, i) /
                                               static_cast<double>(na);
                for (int e = 0; e < na; ++e)
                    alpha(i * de + off + e, j * de + off + e) += w;
            }
    }

    // Generic path: solve B_m = Σ_n tr{B̂_m B̂_n} b_n with dense operators.
    // The Gram matrix must come out as tr{B̂_ija B̂_lmb} = δ_jl δ_im δ_ab N_a;
    // this is asserted, not assumed.
    const int m = 4 * nb;
    std::vector<Eigen::MatrixXcd> ops(static_cast<std::size_t>(m));
    Eigen::VectorXcd rhs(m);
    auto flat = [&](int i, int j, int a) { return a * 4 + i * 2 + j; };
    for (int a = 0; a < nb; ++a) {
        const Eigen::MatrixXcd pi = env_projector(partition, a);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                Eigen::Matrix2cd ketbra = Eigen::Matrix2cd::Zero();
                ketbra(i, j) = 1.0;
                ops[static_cast<std::size_t>(flat(i, j, a))] = kron_sys_env(ketbra, pi);
                rhs[flat(i, j, a)] = b_values[static_cast<std::size_t>(a)](i, j);
            }
    }
    Eigen::MatrixXcd gram(m, m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
            gram(p, q) = (ops[static_cast<std::size_t>(p)] * ops[static_cast<std::size_t>(q)]).trace();
    for (int a = 0; a < nb; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int b = 0; b < nb; ++b)
                    for (int l = 0; l < 2; ++l)
                        for (int mm = 0; mm < 2; ++mm) {
                            const std::complex<double> expected =
                                (j == l && i == mm && a == b)
                                    ? std::complex<double>(partition.band_sizes[static_cast<std::size_t>(a)])
                                    : std::complex<double>(0.0);
                            if (std::abs(gram(flat(i, j, a), flat(l, mm, b)) - expected) > 1e-12)
                                throw std::logic_error("ham_average_state: Gram matrix lost its "
                                                       "expected δ_jl δ_im δ_ab N_a structure");
                        }

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(gram);
    const Eigen::VectorXcd coeff = lu.solve(rhs);
    Eigen::MatrixXcd alpha_gram = Eigen::MatrixXcd::Zero(2 * de, 2 * de);
    for (int p = 0; p < m; ++p)
        alpha_gram += coeff[p] * ops[static_cast<std::size_t>(p)];

    if ((alpha - alpha_gram).cwiseAbs().maxCoeff() > 1e-12)
        throw std::logic_error("ham_average_state: Gram-system solution disagrees with the "
                               "closed form");
    return alpha;
}

} // namespace bandspin
