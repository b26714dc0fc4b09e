// harness.hpp — Experiment configuration, ensemble orchestration, figure
// presets, curve comparison, and CSV/JSON serialization.
//
// Reproducibility contract: a ResultSet is a pure function of its
// ExperimentConfig. Realization k draws its couplings from stream 2k and its
// initial environment vector from stream 2k+1 of the master seed (see
// rng.hpp), so ensembles are independent of worker scheduling. The worker
// count itself comes from the BANDSPIN_WORKERS environment variable and
// affects only wall-clock time.

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bandspin/correlations.hpp"
#include "bandspin/master.hpp"
#include "bandspin/model.hpp"

namespace bandspin {

enum class Method {
    Exact,
    Tcl2Std,
    Tcl4Std,
    Ham,
    Ctcl2Markov,
    Ctcl2Memory,
    Ctcl4,
};

// All methods in canonical (output) order.
const std::vector<Method>& all_methods();
std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct ExperimentConfig {
    ModelParams params{500, 500, 0.5, 5e-4};
    double t_max = 0.0;            // 0 → min(5/(γ1+γ2), recurrence guard)
    int samples = 400;
    int realizations = 10;
    std::uint64_t master_seed = 271828;
    std::vector<Method> methods;
    KernelKind kernel = KernelKind::Sinc2;
    double rho11_0 = 1.0;
    std::complex<double> rho01_0 = 0.0;
    std::string csv_path;
    std::string json_path;

    bool has_method(Method m) const;
    double resolved_t_max() const;   // grid horizon actually used
    void validate() const;
};

// Figure presets: N1 = N2 = 500, δε = 0.5, initial state rho11(0) = 1, with
// λ = 5e-4 (fig2), 1e-3 (fig3), 3e-3 (fig4), 1e-2 (fig5). fig2 selects the
// standard-expansion comparison, the others the memory-kernel comparison.
ExperimentConfig preset(const std::string& figure_id);

// Flat key = value file, '#' comments. Unknown keys are rejected.
ExperimentConfig load_config_file(const std::string& path);

// Apply one key/value pair (also used for CLI flag overrides).
void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

struct MethodCurve {
    Method method = Method::Ham;
    std::vector<double> rho11;
    std::vector<std::complex<double>> rho01;
    std::vector<double> rho11_std;     // exact only: ensemble standard deviation
    std::vector<double> norm_drift;    // exact only: max |norm − 1| across realizations
};

struct RealizationFailure {
    int index = 0;
    std::uint64_t coupling_seed = 0;
    std::uint64_t env_seed = 0;
    std::string message;
};

struct CurveMetrics {
    double max_abs_rho11 = 0.0;
    double rms_rho11 = 0.0;
    double max_abs_rho01 = 0.0;    // deviation of |rho01|
    double rms_rho01 = 0.0;
    double final_abs_rho11 = 0.0;  // |final-value difference|
};

struct ResultSet {
    std::vector<double> times;
    std::vector<MethodCurve> curves;                   // canonical method order
    ExperimentConfig config;                           // echo, with t_max resolved
    std::vector<std::array<std::uint64_t, 2>> realization_seeds;   // {coupling, env}
    std::vector<RealizationFailure> failures;
    std::map<std::string, CurveMetrics> metrics_vs_exact;
    std::string version;

    const MethodCurve* find(Method m) const;
};

ResultSet run_experiment(const ExperimentConfig& config);

// Deviation metrics between two curves on identical time grids.
CurveMetrics compare_curves(const std::vector<double>& times_a, const MethodCurve& a,
                            const std::vector<double>& times_b, const MethodCurve& b);

// CSV schema (bit-stable column order): t, then per method in canonical
// order rho11, rho01_re, rho01_im, with rho11_std and norm_drift appended
// for exact. Values are printed with 17 significant digits and round-trip
// exactly.
std::string render_csv(const ResultSet& results);
void emit_csv(const ResultSet& results, const std::string& path);
void emit_json(const ResultSet& results, const std::string& path);

// Write whatever outputs the config requests (may be none).
void emit(const ResultSet& results);

struct LoadedCsv {
    std::vector<double> times;
    std::vector<MethodCurve> curves;

    const MethodCurve* find(Method m) const;
};

LoadedCsv load_csv(const std::string& path);

} // namespace bandspin
