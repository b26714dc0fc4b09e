#include "bandspin/model.hpp"

#include <random>

#include "bandspin/rng.hpp"

namespace bandspin {

CouplingMatrix sample_couplings(int n1, int n2, std::uint64_t seed) {
    if (n1 < 1 || n2 < 1)
        throw ConfigError("sample_couplings: band level counts must satisfy N1 >= 1 and N2 >= 1");

    std::mt19937_64 gen(seed);
    CouplingMatrix cm;
    cm.seed = seed;
    cm.entries.resize(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            cm.entries(i, j) = complex_gaussian(gen);
    return cm;
}

TwoBandModel build_model(const ModelParams& params, std::uint64_t seed) {
    params.validate();

    TwoBandModel model;
    model.params = params;
    model.couplings = sample_couplings(params.n1, params.n2, seed);
    model.lower_energies.resize(params.n1);
    model.upper_energies.resize(params.n2);
    for (int n = 1; n <= params.n1; ++n)
        model.lower_energies[n - 1] = params.band_width * n / params.n1;
    for (int n = 1; n <= params.n2; ++n)
        model.upper_energies[n - 1] = params.band_width * n / params.n2;
    return model;
}

Eigen::VectorXcd random_lower_band_state(const TwoBandModel& model, std::uint64_t seed) {
    const int n1 = model.params.n1;
    std::mt19937_64 gen(seed);

    Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(model.env_dim());
    double norm2 = 0.0;
    do {
        for (int i = 0; i < n1; ++i) {
            chi[i] = complex_gaussian(gen);
            norm2 += std::norm(chi[i]);
        }
    } while (norm2 == 0.0);
    chi.head(n1) /= std::sqrt(norm2);
    return chi;
}

Eigen::MatrixXcd interaction_coupling(const TwoBandModel& model, double t) {
    const int n1 = model.params.n1;
    const int n2 = model.params.n2;
    const double lambda = model.params.coupling;

    Eigen::MatrixXcd b(n1, n2);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j)
            b(i, j) = lambda * model.couplings.entries(i, j) *
                      std::polar(1.0, -model.omega(i, j) * t);
    return b;
}

} // namespace bandspin
