#include "bandspin/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "bandspin/propagator.hpp"
#include "bandspin/rng.hpp"
#include "bandspin/version.hpp"

namespace bandspin {

namespace {

std::string format_value(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("config: cannot parse number '" + text + "' for key '" + key + "'");
    return v;
}

long long parse_int(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("config: cannot parse integer '" + text + "' for key '" + key + "'");
    return v;
}

std::uint64_t parse_seed(const std::string& text, const std::string& key) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError("config: cannot parse seed '" + text + "' for key '" + key + "'");
    return v;
}

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::vector<Method> parse_method_list(const std::string& text) {
    std::vector<Method> methods;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        if (name.empty()) continue;
        const auto m = parse_method(name);
        if (!m) throw ConfigError("config: unknown method '" + name + "'");
        if (std::find(methods.begin(), methods.end(), *m) == methods.end())
            methods.push_back(*m);
    }
    return methods;
}

int worker_count(int jobs) {
    int w = 0;
    if (const char* env = std::getenv("BANDSPIN_WORKERS")) {
        char* end = nullptr;
        w = static_cast<int>(std::strtol(env, &end, 10));
        if (end == env || *end != '\0' || w < 1)
            throw ConfigError("BANDSPIN_WORKERS must be a positive integer");
    } else {
        w = static_cast<int>(std::thread::hardware_concurrency());
        if (w < 1) w = 1;
    }
    return std::min(w, std::max(1, jobs));
}

DensityMatrix2 initial_density(const ExperimentConfig& config) {
    DensityMatrix2 rho;
    rho(0, 0) = 1.0 - config.rho11_0;
    rho(1, 1) = config.rho11_0;
    rho(0, 1) = config.rho01_0;
    rho(1, 0) = std::conj(config.rho01_0);
    return rho;
}

Eigen::Vector2cd initial_system_amplitudes(const ExperimentConfig& config) {
    const double beta = std::sqrt(config.rho11_0);
    Eigen::Vector2cd sys;
    if (config.rho11_0 > 0.0) {
        sys << config.rho01_0 / beta, beta;
    } else {
        sys << 1.0, 0.0;
    }
    sys /= sys.norm();
    return sys;
}

} // namespace

const std::vector<Method>& all_methods() {
    static const std::vector<Method> methods = {
        Method::Exact,       Method::Tcl2Std,     Method::Tcl4Std, Method::Ham,
        Method::Ctcl2Markov, Method::Ctcl2Memory, Method::Ctcl4,
    };
    return methods;
}

std::string method_name(Method m) {
    switch (m) {
        case Method::Exact: return "exact";
        case Method::Tcl2Std: return "tcl2_std";
        case Method::Tcl4Std: return "tcl4_std";
        case Method::Ham: return "ham";
        case Method::Ctcl2Markov: return "ctcl2_markov";
        case Method::Ctcl2Memory: return "ctcl2_memory";
        case Method::Ctcl4: return "ctcl4";
    }
    return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    return std::nullopt;
}

bool ExperimentConfig::has_method(Method m) const {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

double ExperimentConfig::resolved_t_max() const {
    if (t_max > 0.0) return t_max;
    const double guard =
        M_PI * std::min(params.n1, params.n2) / params.band_width;   // half recurrence time
    const RateSet rates = golden_rule_rates(params);
    if (rates.total() <= 0.0) return guard;
    return std::min(5.0 / rates.total(), guard);
}

void ExperimentConfig::validate() const {
    params.validate();
    if (t_max < 0.0) throw ConfigError("config: t_max must be positive (or 0 for automatic)");
    if (samples < 2) throw ConfigError("config: need at least 2 samples");
    if (methods.empty()) throw ConfigError("config: at least one method must be selected");
    if (has_method(Method::Exact) && realizations < 1)
        throw ConfigError("config: exact dynamics needs realizations >= 1");
    if (rho11_0 < 0.0 || rho11_0 > 1.0)
        throw ConfigError("config: rho11_0 must lie in [0, 1]");
    const double coherence_budget = rho11_0 * (1.0 - rho11_0);
    if (std::norm(rho01_0) > coherence_budget + 1e-12)
        throw ConfigError("config: |rho01_0|^2 exceeds rho11_0*(1 - rho11_0); not a state");
    if (has_method(Method::Exact) &&
        std::abs(std::norm(rho01_0) - coherence_budget) > 1e-9)
        throw ConfigError("config: exact dynamics propagates pure product states, which "
                          "requires |rho01_0|^2 = rho11_0*(1 - rho11_0)");
}

ExperimentConfig preset(const std::string& figure_id) {
    ExperimentConfig config;
    config.params = {500, 500, 0.5, 5e-4};
    config.rho11_0 = 1.0;
    config.rho01_0 = 0.0;
    if (figure_id == "fig2") {
        config.params.coupling = 5e-4;
        config.methods = {Method::Exact, Method::Tcl2Std, Method::Tcl4Std, Method::Ham};
    } else if (figure_id == "fig3") {
        config.params.coupling = 1e-3;
        config.methods = {Method::Exact, Method::Ham, Method::Ctcl2Memory};
    } else if (figure_id == "fig4") {
        config.params.coupling = 3e-3;
        config.methods = {Method::Exact, Method::Ham, Method::Ctcl2Memory};
    } else if (figure_id == "fig5") {
        config.params.coupling = 1e-2;
        config.methods = {Method::Exact, Method::Ham, Method::Ctcl2Memory};
    } else {
        throw ConfigError("unknown figure id '" + figure_id + "' (expected fig2..fig5)");
    }
    return config;
}

void set_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
    if (key == "n1") config.params.n1 = static_cast<int>(parse_int(value, key));
    else if (key == "n2") config.params.n2 = static_cast<int>(parse_int(value, key));
    else if (key == "band_width") config.params.band_width = parse_double(value, key);
    else if (key == "coupling") config.params.coupling = parse_double(value, key);
    else if (key == "t_max") config.t_max = parse_double(value, key);
    else if (key == "samples") config.samples = static_cast<int>(parse_int(value, key));
    else if (key == "realizations") config.realizations = static_cast<int>(parse_int(value, key));
    else if (key == "master_seed") config.master_seed = parse_seed(value, key);
    else if (key == "methods") config.methods = parse_method_list(value);
    else if (key == "kernel") {
        if (value == "sinc2") config.kernel = KernelKind::Sinc2;
        else if (value == "exponential") config.kernel = KernelKind::Exponential;
        else throw ConfigError("config: unknown kernel '" + value + "'");
    }
    else if (key == "rho11_0") config.rho11_0 = parse_double(value, key);
    else if (key == "rho01_re_0") config.rho01_0.real(parse_double(value, key));
    else if (key == "rho01_im_0") config.rho01_0.imag(parse_double(value, key));
    else if (key == "csv") config.csv_path = value;
    else if (key == "json") config.json_path = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    ExperimentConfig config;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config " + path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        set_config_value(config, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

const MethodCurve* ResultSet::find(Method m) const {
    for (const auto& c : curves)
        if (c.method == m) return &c;
    return nullptr;
}

const MethodCurve* LoadedCsv::find(Method m) const {
    for (const auto& c : curves)
        if (c.method == m) return &c;
    return nullptr;
}

namespace {

MethodCurve run_exact_ensemble(const ExperimentConfig& config, const TimeGrid& grid,
                               ResultSet& rs) {
    const int n_real = config.realizations;
    const Eigen::Vector2cd sys = initial_system_amplitudes(config);

    rs.realization_seeds.reserve(static_cast<std::size_t>(n_real));
    for (int k = 0; k < n_real; ++k)
        rs.realization_seeds.push_back(
            {mix_seed(config.master_seed, 2 * static_cast<std::uint64_t>(k)),
             mix_seed(config.master_seed, 2 * static_cast<std::uint64_t>(k) + 1)});

    std::vector<std::optional<Trajectory>> trajectories(static_cast<std::size_t>(n_real));
    std::vector<std::string> errors(static_cast<std::size_t>(n_real));
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= n_real) break;
            const auto seeds = rs.realization_seeds[static_cast<std::size_t>(k)];
            try {
                const TwoBandModel model = build_model(config.params, seeds[0]);
                const Eigen::VectorXcd chi = random_lower_band_state(model, seeds[1]);
                const PureState psi0 = product_state(sys, chi);
                Trajectory traj = evolve(model, psi0, grid);
                traj.env_seed = seeds[1];
                trajectories[static_cast<std::size_t>(k)] = std::move(traj);
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(k)] = e.what();
            }
        }
    };
    const int workers = worker_count(n_real);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    int successes = 0;
    for (int k = 0; k < n_real; ++k) {
        if (trajectories[static_cast<std::size_t>(k)]) {
            ++successes;
        } else {
            rs.failures.push_back({k, rs.realization_seeds[static_cast<std::size_t>(k)][0],
                                   rs.realization_seeds[static_cast<std::size_t>(k)][1],
                                   errors[static_cast<std::size_t>(k)]});
        }
    }
    if (successes == 0)
        throw AccuracyError("all " + std::to_string(n_real) + " realizations failed; first: " +
                            errors.front());

    const std::size_t nt = rs.times.size();
    MethodCurve curve;
    curve.method = Method::Exact;
    curve.rho11.assign(nt, 0.0);
    curve.rho01.assign(nt, {0.0, 0.0});
    curve.rho11_std.assign(nt, 0.0);
    curve.norm_drift.assign(nt, 0.0);

    // Sequential, index-ordered reduction keeps the output independent of
    // worker scheduling.
    for (std::size_t s = 0; s < nt; ++s) {
        double mean = 0.0;
        std::complex<double> mean01 = 0.0;
        double drift = 0.0;
        for (int k = 0; k < n_real; ++k) {
            const auto& traj = trajectories[static_cast<std::size_t>(k)];
            if (!traj) continue;
            const auto& rec = traj->records[s];
            mean += rec.rho(1, 1).real();
            mean01 += rec.rho(0, 1);
            drift = std::max(drift, std::abs(rec.norm - 1.0));
        }
        mean /= successes;
        mean01 /= static_cast<double>(successes);
        double var = 0.0;
        if (successes > 1) {
            for (int k = 0; k < n_real; ++k) {
                const auto& traj = trajectories[static_cast<std::size_t>(k)];
                if (!traj) continue;
                const double d = traj->records[s].rho(1, 1).real() - mean;
                var += d * d;
            }
            var /= (successes - 1);
        }
        curve.rho11[s] = mean;
        curve.rho01[s] = mean01;
        curve.rho11_std[s] = std::sqrt(var);
        curve.norm_drift[s] = drift;
    }
    return curve;
}

MethodCurve curve_from_correlated(Method m, const CorrelatedTrajectory& traj) {
    MethodCurve curve;
    curve.method = m;
    curve.rho11.reserve(traj.states.size());
    curve.rho01.reserve(traj.states.size());
    for (const auto& s : traj.states) {
        const DensityMatrix2 rho = s.reduced();
        curve.rho11.push_back(rho(1, 1).real());
        curve.rho01.push_back(rho(0, 1));
    }
    return curve;
}

} // namespace

ResultSet run_experiment(const ExperimentConfig& config) {
    config.validate();

    ResultSet rs;
    rs.config = config;
    rs.config.t_max = config.resolved_t_max();
    rs.version = kVersion;

    const TimeGrid grid{0.0, rs.config.t_max, config.samples};
    rs.times = grid.times();

    const RateSet rates = golden_rule_rates(config.params, config.has_method(Method::Ctcl4));
    const Kernel kernel{config.kernel, config.params.band_width};
    const DensityMatrix2 rho0 = initial_density(config);
    const CorrelatedState state0{rho0, DensityMatrix2::Zero()};

    for (Method m : all_methods()) {
        if (!config.has_method(m)) continue;
        switch (m) {
            case Method::Exact:
                rs.curves.push_back(run_exact_ensemble(config, grid, rs));
                break;
            case Method::Tcl2Std:
            case Method::Tcl4Std:
            case Method::Ham: {
                MethodCurve curve;
                curve.method = m;
                curve.rho11.reserve(rs.times.size());
                curve.rho01.reserve(rs.times.size());
                for (const double t : rs.times) {
                    DensityMatrix2 rho;
                    if (m == Method::Tcl2Std) rho = tcl2_standard(rates, rho0, t);
                    else if (m == Method::Tcl4Std) rho = tcl4_standard(rates, rho0, t);
                    else rho = ham_two_band(rates, rho0, t);
                    curve.rho11.push_back(rho(1, 1).real());
                    curve.rho01.push_back(rho(0, 1));
                }
                rs.curves.push_back(std::move(curve));
                break;
            }
            case Method::Ctcl2Markov:
                rs.curves.push_back(curve_from_correlated(
                    m, correlated_tcl2(kernel, rates, state0, grid, CtclMode::Markov)));
                break;
            case Method::Ctcl2Memory:
                rs.curves.push_back(curve_from_correlated(
                    m, correlated_tcl2(kernel, rates, state0, grid, CtclMode::Memory)));
                break;
            case Method::Ctcl4:
                rs.curves.push_back(
                    curve_from_correlated(m, correlated_tcl4_grid(rates, state0, grid)));
                break;
        }
    }

    if (const MethodCurve* exact = rs.find(Method::Exact)) {
        for (const auto& curve : rs.curves) {
            if (curve.method == Method::Exact) continue;
            rs.metrics_vs_exact[method_name(curve.method)] =
                compare_curves(rs.times, *exact, rs.times, curve);
        }
    }
    return rs;
}

CurveMetrics compare_curves(const std::vector<double>& times_a, const MethodCurve& a,
                            const std::vector<double>& times_b, const MethodCurve& b) {
    if (times_a.size() != times_b.size() || !std::equal(times_a.begin(), times_a.end(), times_b.begin()))
        throw ConfigError("compare_curves: time grids do not match");
    if (a.rho11.size() != times_a.size() || b.rho11.size() != times_b.size())
        throw ConfigError("compare_curves: curve length does not match its grid");

    CurveMetrics metrics;
    double sum11 = 0.0;
    double sum01 = 0.0;
    const std::size_t n = times_a.size();
    for (std::size_t s = 0; s < n; ++s) {
        const double d11 = std::abs(a.rho11[s] - b.rho11[s]);
        const double d01 = std::abs(std::abs(a.rho01[s]) - std::abs(b.rho01[s]));
        metrics.max_abs_rho11 = std::max(metrics.max_abs_rho11, d11);
        metrics.max_abs_rho01 = std::max(metrics.max_abs_rho01, d01);
        sum11 += d11 * d11;
        sum01 += d01 * d01;
    }
    metrics.rms_rho11 = std::sqrt(sum11 / n);
    metrics.rms_rho01 = std::sqrt(sum01 / n);
    metrics.final_abs_rho11 = std::abs(a.rho11.back() - b.rho11.back());
    return metrics;
}

std::string render_csv(const ResultSet& results) {
    std::string out = "t";
    for (const auto& curve : results.curves) {
        const std::string name = method_name(curve.method);
        out += "," + name + "_rho11," + name + "_rho01_re," + name + "_rho01_im";
        if (curve.method == Method::Exact)
            out += "," + name + "_rho11_std," + name + "_norm_drift";
    }
    out += "\n";
    for (std::size_t s = 0; s < results.times.size(); ++s) {
        out += format_value(results.times[s]);
        for (const auto& curve : results.curves) {
            out += "," + format_value(curve.rho11[s]);
            out += "," + format_value(curve.rho01[s].real());
            out += "," + format_value(curve.rho01[s].imag());
            if (curve.method == Method::Exact) {
                out += "," + format_value(curve.rho11_std[s]);
                out += "," + format_value(curve.norm_drift[s]);
            }
        }
        out += "\n";
    }
    return out;
}

void emit_csv(const ResultSet& results, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << render_csv(results);
    if (!out) throw IoError("failed while writing '" + path + "'");
}

void emit_json(const ResultSet& results, const std::string& path) {
    nlohmann::json j;
    j["version"] = results.version;

    nlohmann::json cfg;
    cfg["n1"] = results.config.params.n1;
    cfg["n2"] = results.config.params.n2;
    cfg["band_width"] = results.config.params.band_width;
    cfg["coupling"] = results.config.params.coupling;
    cfg["t_max"] = results.config.t_max;
    cfg["samples"] = results.config.samples;
    cfg["realizations"] = results.config.realizations;
    cfg["master_seed"] = results.config.master_seed;
    std::vector<std::string> names;
    for (Method m : all_methods())
        if (results.config.has_method(m)) names.push_back(method_name(m));
    cfg["methods"] = names;
    cfg["kernel"] = results.config.kernel == KernelKind::Sinc2 ? "sinc2" : "exponential";
    cfg["rho11_0"] = results.config.rho11_0;
    cfg["rho01_0"] = {results.config.rho01_0.real(), results.config.rho01_0.imag()};
    j["config"] = cfg;

    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& s : results.realization_seeds) seeds.push_back({s[0], s[1]});
    j["realization_seeds"] = seeds;

    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : results.failures)
        failures.push_back({{"index", f.index},
                            {"coupling_seed", f.coupling_seed},
                            {"env_seed", f.env_seed},
                            {"message", f.message}});
    j["failures"] = failures;

    j["times"] = results.times;
    nlohmann::json curves;
    for (const auto& curve : results.curves) {
        nlohmann::json c;
        c["rho11"] = curve.rho11;
        std::vector<double> re(curve.rho01.size()), im(curve.rho01.size());
        for (std::size_t s = 0; s < curve.rho01.size(); ++s) {
            re[s] = curve.rho01[s].real();
            im[s] = curve.rho01[s].imag();
        }
        c["rho01_re"] = re;
        c["rho01_im"] = im;
        if (curve.method == Method::Exact) {
            c["rho11_std"] = curve.rho11_std;
            c["norm_drift"] = curve.norm_drift;
        }
        curves[method_name(curve.method)] = c;
    }
    j["curves"] = curves;

    nlohmann::json metrics;
    for (const auto& [name, m] : results.metrics_vs_exact)
        metrics[name] = {{"max_abs_rho11", m.max_abs_rho11},
                         {"rms_rho11", m.rms_rho11},
                         {"max_abs_rho01", m.max_abs_rho01},
                         {"rms_rho01", m.rms_rho01},
                         {"final_abs_rho11", m.final_abs_rho11}};
    j["metrics_vs_exact"] = metrics;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed while writing '" + path + "'");
}

void emit(const ResultSet& results) {
    if (!results.config.csv_path.empty()) emit_csv(results, results.config.csv_path);
    if (!results.config.json_path.empty()) emit_json(results, results.config.json_path);
}

LoadedCsv load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("csv '" + path + "': empty file");

    std::vector<std::string> columns;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) columns.push_back(col);
    }
    if (columns.empty() || columns.front() != "t")
        throw ConfigError("csv '" + path + "': first column must be 't'");

    LoadedCsv loaded;
    struct Slot {
        std::size_t curve;   // index into loaded.curves
        int field;           // 0 rho11, 1 re, 2 im, 3 std, 4 drift
    };
    std::vector<Slot> slots;
    auto curve_for = [&](Method m) -> std::size_t {
        for (std::size_t c = 0; c < loaded.curves.size(); ++c)
            if (loaded.curves[c].method == m) return c;
        loaded.curves.push_back({});
        loaded.curves.back().method = m;
        return loaded.curves.size() - 1;
    };
    for (std::size_t c = 1; c < columns.size(); ++c) {
        const std::string& col = columns[c];
        bool matched = false;
        for (Method m : all_methods()) {
            const std::string name = method_name(m);
            const std::array<std::pair<std::string, int>, 5> fields{{{name + "_rho11", 0},
                                                                     {name + "_rho01_re", 1},
                                                                     {name + "_rho01_im", 2},
                                                                     {name + "_rho11_std", 3},
                                                                     {name + "_norm_drift", 4}}};
            for (const auto& [field_name, field] : fields) {
                if (col == field_name) {
                    slots.push_back({curve_for(m), field});
                    matched = true;
                    break;
                }
            }
            if (matched) break;
        }
        if (!matched) throw ConfigError("csv '" + path + "': unknown column '" + col + "'");
    }

    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        if (!std::getline(ss, cell, ','))
            throw ConfigError("csv '" + path + "': malformed line " + std::to_string(lineno));
        loaded.times.push_back(parse_double(trim(cell), "t"));
        for (const auto& slot : slots) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError("csv '" + path + "': short line " + std::to_string(lineno));
            const double v = parse_double(trim(cell), "value");
            MethodCurve& curve = loaded.curves[slot.curve];
            switch (slot.field) {
                case 0: curve.rho11.push_back(v); break;
                case 1: curve.rho01.emplace_back(v, 0.0); break;
                case 2:
                    if (curve.rho01.empty())
                        throw ConfigError("csv '" + path + "': rho01_im before rho01_re");
                    curve.rho01.back().imag(v);
                    break;
                case 3: curve.rho11_std.push_back(v); break;
                case 4: curve.norm_drift.push_back(v); break;
            }
        }
        if (std::getline(ss, cell, ','))
            throw ConfigError("csv '" + path + "': extra columns on line " + std::to_string(lineno));
    }
    return loaded;
}

} // namespace bandspin
