// bandspin — command-line front end.
//
// Subcommands:
//   run <config>       run an experiment described by a key = value file
//   figure <fig2..5>   run a built-in figure preset
//   rates              print Golden-Rule and fourth-order rates for parameters
//   compare <A> <B>    deviation metrics between two emitted CSV files
//
// Exit codes: 0 success, 1 configuration error, 2 numerical-accuracy
// failure, 3 I/O error.

#include <complex>
#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "bandspin/harness.hpp"
#include "bandspin/version.hpp"

namespace {

using namespace bandspin;

struct Overrides {
    std::vector<std::pair<std::string, std::string>> pairs;

    void add_flag(CLI::App* cmd, const std::string& flag, const std::string& key,
                  const std::string& description) {
        cmd->add_option_function<std::string>(
               flag,
               [this, key](const std::string& value) { pairs.emplace_back(key, value); },
               description)
            ->expected(1);
    }

    void apply(ExperimentConfig& config) const {
        for (const auto& [key, value] : pairs) set_config_value(config, key, value);
    }
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    ov.add_flag(cmd, "--n1", "n1", "lower-band level count");
    ov.add_flag(cmd, "--n2", "n2", "upper-band level count");
    ov.add_flag(cmd, "--band-width", "band_width", "band width");
    ov.add_flag(cmd, "--coupling", "coupling", "coupling strength");
    ov.add_flag(cmd, "--t-max", "t_max", "grid horizon (0 = automatic)");
    ov.add_flag(cmd, "--samples", "samples", "sample count");
    ov.add_flag(cmd, "--realizations", "realizations", "exact-ensemble size");
    ov.add_flag(cmd, "--master-seed", "master_seed", "ensemble master seed");
    ov.add_flag(cmd, "--methods", "methods", "comma-separated method list");
    ov.add_flag(cmd, "--kernel", "kernel", "sinc2 or exponential");
    ov.add_flag(cmd, "--rho11-0", "rho11_0", "initial upper-level population");
    ov.add_flag(cmd, "--rho01-re-0", "rho01_re_0", "initial coherence, real part");
    ov.add_flag(cmd, "--rho01-im-0", "rho01_im_0", "initial coherence, imaginary part");
    ov.add_flag(cmd, "--csv", "csv", "CSV output path");
    ov.add_flag(cmd, "--json", "json", "JSON output path");
}

int run_and_emit(ExperimentConfig config, const Overrides& ov) {
    ov.apply(config);
    const ResultSet results = run_experiment(config);
    emit(results);
    if (!results.failures.empty()) {
        std::fprintf(stderr, "%zu of %d realizations failed:\n", results.failures.size(),
                     config.realizations);
        for (const auto& f : results.failures)
            std::fprintf(stderr, "  realization %d (coupling_seed=%llu env_seed=%llu): %s\n",
                         f.index, static_cast<unsigned long long>(f.coupling_seed),
                         static_cast<unsigned long long>(f.env_seed), f.message.c_str());
        return 2;
    }
    std::printf("t_max %.17g, %d samples, methods:", results.config.t_max,
                results.config.samples);
    for (const auto& curve : results.curves)
        std::printf(" %s", method_name(curve.method).c_str());
    std::printf("\n");
    for (const auto& [name, m] : results.metrics_vs_exact)
        std::printf("  exact vs %-12s  max|d rho11| %.3e   rms %.3e   final %.3e\n",
                    name.c_str(), m.max_abs_rho11, m.rms_rho11, m.final_abs_rho11);
    if (results.config.csv_path.empty() && results.config.json_path.empty())
        std::fprintf(stderr, "note: no csv/json output path configured; metrics only\n");
    return 0;
}

void print_rates(const ModelParams& params, bool fourth) {
    const RateSet rates = golden_rule_rates(params, fourth);
    std::printf("gamma1        %.17g\n", rates.gamma1);
    std::printf("gamma2        %.17g\n", rates.gamma2);
    std::printf("gamma1/width  %.17g\n", rates.gamma1 / params.band_width);
    std::printf("gamma2/width  %.17g\n", rates.gamma2 / params.band_width);
    if (rates.fourth_order) {
        const auto& g = *rates.fourth_order;
        std::printf("Gamma1        %.17g\n", g.gamma_1);
        std::printf("Gamma2        %.17g\n", g.gamma_2);
        std::printf("Gamma3        %.17g\n", g.gamma_3);
        std::printf("Gamma1~       %.17g\n", g.gamma_1_tilde);
        std::printf("Gamma2~       %.17g\n", g.gamma_2_tilde);
        std::printf("Gamma3~       %.17g\n", g.gamma_3_tilde);
        std::printf("Gamma1+Gamma2~ %.17g\n", g.gamma_1 + g.gamma_2_tilde);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-band spin-environment simulator and master-equation solvers"};
    app.set_version_flag("--version", bandspin::kVersion);
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
    std::string config_path;
    run_cmd->add_option("config", config_path, "key = value config file")->required();
    Overrides run_overrides;
    add_override_flags(run_cmd, run_overrides);

    auto* fig_cmd = app.add_subcommand("figure", "run a built-in figure preset");
    std::string figure_id;
    fig_cmd->add_option("id", figure_id, "fig2, fig3, fig4 or fig5")->required();
    Overrides fig_overrides;
    add_override_flags(fig_cmd, fig_overrides);

    auto* rates_cmd = app.add_subcommand("rates", "print relaxation rates for parameters");
    ModelParams rate_params{500, 500, 0.5, 5e-4};
    bool fourth = false;
    rates_cmd->add_option("--n1", rate_params.n1, "lower-band level count");
    rates_cmd->add_option("--n2", rate_params.n2, "upper-band level count");
    rates_cmd->add_option("--band-width", rate_params.band_width, "band width");
    rates_cmd->add_option("--coupling", rate_params.coupling, "coupling strength");
    rates_cmd->add_flag("--fourth-order", fourth, "include the fourth-order rates");

    auto* cmp_cmd = app.add_subcommand("compare", "compare two emitted CSV files");
    std::string path_a, path_b, method_a_name, method_b_name;
    cmp_cmd->add_option("fileA", path_a)->required();
    cmp_cmd->add_option("fileB", path_b)->required();
    cmp_cmd->add_option("--method-a", method_a_name, "curve from fileA (default: its only curve)");
    cmp_cmd->add_option("--method-b", method_b_name, "curve from fileB (default: its only curve)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed())
            return run_and_emit(bandspin::load_config_file(config_path), run_overrides);
        if (fig_cmd->parsed())
            return run_and_emit(bandspin::preset(figure_id), fig_overrides);
        if (rates_cmd->parsed()) {
            print_rates(rate_params, fourth);
            return 0;
        }
        if (cmp_cmd->parsed()) {
            const LoadedCsv a = load_csv(path_a);
            const LoadedCsv b = load_csv(path_b);
            auto pick = [](const LoadedCsv& file, const std::string& request,
                           const char* which) -> const MethodCurve& {
                if (!request.empty()) {
                    const auto m = parse_method(request);
                    if (!m) throw ConfigError("unknown method '" + request + "'");
                    if (const MethodCurve* c = file.find(*m)) return *c;
                    throw ConfigError("file " + std::string(which) + " has no '" + request +
                                      "' curve");
                }
                if (file.curves.size() != 1)
                    throw ConfigError(std::string("file ") + which +
                                      " holds several curves; pick one with --method-" + which);
                return file.curves.front();
            };
            const MethodCurve& ca = pick(a, method_a_name, "a");
            const MethodCurve& cb = pick(b, method_b_name, "b");
            const CurveMetrics m = compare_curves(a.times, ca, b.times, cb);
            std::printf("max|d rho11|   %.17g\n", m.max_abs_rho11);
            std::printf("rms d rho11    %.17g\n", m.rms_rho11);
            std::printf("max|d |rho01|| %.17g\n", m.max_abs_rho01);
            std::printf("rms d |rho01|  %.17g\n", m.rms_rho01);
            std::printf("final |d rho11| %.17g\n", m.final_abs_rho11);
            return 0;
        }
    } catch (const bandspin::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const bandspin::AccuracyError& e) {
        std::fprintf(stderr, "accuracy error: %s\n", e.what());
        return 2;
    } catch (const bandspin::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
