// infofit command line: reproducible experiments around the information
// estimators, the resource model, and the fitting drivers. Subcommands:
// generate, toy-sweep, sweep, fit, estimate, fixtures.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <nlohmann/json.hpp>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "infofit/common.hpp"
#include "infofit/datagen.hpp"
#include "infofit/dynamics.hpp"
#include "infofit/estimators.hpp"
#include "infofit/io.hpp"
#include "infofit/objectives.hpp"
#include "infofit/optimize.hpp"

namespace fs = std::filesystem;
using infofit::ConfigError;
using nlohmann::json;

namespace {

struct LoadedConfig {
    json doc = json::object();
    std::string hash_hex = "0";
};

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

LoadedConfig load_config(const std::string& path) {
    LoadedConfig out;
    if (path.empty()) {
        out.hash_hex = hex64(infofit::fnv1a64(std::string("{}")));
        return out;
    }
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    out.hash_hex = hex64(infofit::fnv1a64(raw));
    try {
        out.doc = json::parse(raw);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!out.doc.is_object()) throw ConfigError("config root must be an object");
    const int version = out.doc.value("schema_version", 1);
    if (version != 1) throw ConfigError("unsupported config schema_version");
    return out;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + " must be an object");
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw ConfigError("unknown field '" + item.key() + "' in " + context);
    }
}

json section(const json& doc, const std::string& name) {
    if (!doc.contains(name)) return json::object();
    return doc.at(name);
}

infofit::CogParams cog_from_config(const json& j, const std::string& context) {
    check_keys(j, {"k_w", "k_r", "k_b", "K_A", "K_B", "B_max", "rho", "A0_init", "B0_init",
                   "t_start"},
               context);
    infofit::CogParams p;
    p.k_w = j.value("k_w", p.k_w);
    p.k_r = j.value("k_r", p.k_r);
    p.k_b = j.value("k_b", p.k_b);
    p.K_A = j.value("K_A", p.K_A);
    p.K_B = j.value("K_B", p.K_B);
    p.B_max = j.value("B_max", p.B_max);
    p.rho = j.value("rho", p.rho);
    p.A0_init = j.value("A0_init", p.A0_init);
    p.B0_init = j.value("B0_init", p.B0_init);
    p.t_start = j.value("t_start", p.t_start);
    return p;
}

json cog_to_config(const infofit::CogParams& p) {
    return json{{"k_w", p.k_w},     {"k_r", p.k_r},         {"k_b", p.k_b},
                {"K_A", p.K_A},     {"K_B", p.K_B},         {"B_max", p.B_max},
                {"rho", p.rho},     {"A0_init", p.A0_init}, {"B0_init", p.B0_init},
                {"t_start", p.t_start}};
}

infofit::EstimatorConfig estimator_from_config(const json& j, const std::string& context) {
    check_keys(j, {"kind", "k", "lnc_alpha", "jitter_scale", "seed"}, context);
    infofit::EstimatorConfig cfg;
    cfg.k = j.value("k", cfg.k);
    cfg.lnc_alpha = j.value("lnc_alpha", cfg.lnc_alpha);
    cfg.jitter_scale = j.value("jitter_scale", cfg.jitter_scale);
    cfg.seed = j.value("seed", cfg.seed);
    return cfg;
}

int resolve_threads(int cli_threads, const json& sec) {
    if (cli_threads > 0) return cli_threads;
    if (sec.contains("threads") && sec.at("threads").get<int>() > 0)
        return sec.at("threads").get<int>();
    if (const char* env = std::getenv("INFOFIT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string resolve_out(const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("INFOFIT_OUT")) {
        if (*env) return env;
    }
    throw ConfigError("no output directory: pass --out or set INFOFIT_OUT");
}

void write_curve_csv(const fs::path& path, const infofit::SweepCurve& curve,
                     const std::string& hash, const std::vector<std::string>& metadata) {
    infofit::CsvWriter csv(path);
    csv.comment(std::string("infofit ") + infofit::kVersion + " config_hash=" + hash);
    for (const auto& m : metadata) csv.comment(m);
    csv.header({"param_value", "objective_nats", "fc", "error_flag"});
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        std::string error = curve.errors[i];
        std::replace(error.begin(), error.end(), ',', ';');  // keep the row parseable
        csv.row(curve.grid[i], curve.values[i], curve.fc[i], error);
    }
}

std::vector<double> linspace(double lo, double hi, long n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::string format_compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const LoadedConfig& cfg, const std::string& out_dir, int n_series_flag,
                 int n_tasks_flag, long seed_flag, double step_flag, int trace_stride) {
    const json sec = section(cfg.doc, "generate");
    check_keys(sec, {"n_series", "n_tasks", "master_seed", "step", "cog_params", "schedule",
                     "outcome"},
               "generate");

    infofit::CogParams cog = cog_from_config(section(sec, "cog_params"), "generate.cog_params");

    const json sj = section(sec, "schedule");
    check_keys(sj, {"lambda_on", "lambda_off", "lambda_break", "break_every"},
               "generate.schedule");
    infofit::ScheduleGenConfig sched;
    sched.lambda_on = sj.value("lambda_on", sched.lambda_on);
    sched.lambda_off = sj.value("lambda_off", sched.lambda_off);
    sched.lambda_break = sj.value("lambda_break", sched.lambda_break);
    sched.break_every = sj.value("break_every", sched.break_every);
    sched.n_tasks = n_tasks_flag > 0 ? n_tasks_flag : sec.value("n_tasks", 300);

    const int n_series = n_series_flag > 0 ? n_series_flag : sec.value("n_series", 5);
    const auto master_seed =
        seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : sec.value("master_seed", 1ull);
    const double step = step_flag > 0 ? step_flag : sec.value("step", 0.01);

    const json oj = section(sec, "outcome");
    check_keys(oj, {"mode", "alpha", "a_ref", "p_high", "q_high"}, "generate.outcome");
    const std::string mode = oj.value("mode", std::string("calibrate"));
    std::optional<infofit::OutcomeModel> fixed;
    double p_high = oj.value("p_high", 0.7);
    double q_high = oj.value("q_high", 0.8);
    if (mode == "fixed") {
        infofit::OutcomeModel m;
        m.alpha = oj.value("alpha", m.alpha);
        m.a_ref = oj.value("a_ref", m.a_ref);
        fixed = m;
    } else if (mode != "calibrate") {
        throw ConfigError("generate.outcome.mode must be 'calibrate' or 'fixed'");
    }

    infofit::Dataset data =
        infofit::generate_dataset(cog, sched, n_series, fixed, master_seed, step, p_high, q_high);
    infofit::save_dataset(data, out_dir);

    if (trace_stride > 0) {
        for (std::size_t i = 0; i < data.series.size(); ++i) {
            const infofit::Trajectory traj =
                infofit::integrate_schedule(cog, data.series[i].schedule, step, trace_stride);
            char name[48];
            std::snprintf(name, sizeof(name), "series_%03zu_trajectory.csv", i);
            infofit::write_trajectory_csv(traj, (fs::path(out_dir) / name).string());
        }
    }

    std::cout << "wrote dataset: " << out_dir << "\n"
              << "  series: " << data.series.size() << "  tasks/series: " << sched.n_tasks
              << "  total tasks: " << data.total_tasks() << "\n"
              << "  outcome model: alpha=" << data.outcome_model.alpha
              << " a_ref=" << data.outcome_model.a_ref
              << (data.calibrated ? " (calibrated)" : " (fixed)") << "\n"
              << "  success rate: " << data.success_rate() << "\n";
    return 0;
}

// --------------------------------------------------------------- toy-sweep

int cmd_toy_sweep(const LoadedConfig& cfg, const std::string& out_dir, long seed_flag,
                  int threads_flag) {
    const json sec = section(cfg.doc, "toy_sweep");
    check_keys(sec, {"cases", "t_min", "t_max", "n_samples", "noise_std", "seed", "grid",
                     "estimator", "threads"},
               "toy_sweep");

    const double t_min = sec.value("t_min", 0.0);
    const double t_max = sec.value("t_max", 3.0);
    const long n_samples = sec.value("n_samples", 1000);
    const double noise_std = sec.value("noise_std", 1e-8);
    const auto seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag)
                                     : sec.value("seed", 42ull);
    if (!(t_max > t_min)) throw ConfigError("toy_sweep needs t_max > t_min");
    if (n_samples < 2) throw ConfigError("toy_sweep needs n_samples >= 2");

    const json gj = section(sec, "grid");
    check_keys(gj, {"min", "max", "step"}, "toy_sweep.grid");
    const double gmin = gj.value("min", -1.0);
    const double gmax = gj.value("max", 4.0);
    const double gstep = gj.value("step", 0.01);
    if (!(gstep > 0.0) || !(gmax > gmin)) throw ConfigError("toy_sweep.grid is invalid");
    std::vector<double> grid;
    for (long i = 0;; ++i) {
        double v = gmin + static_cast<double>(i) * gstep;
        if (v > gmax + gstep * 1e-9) break;
        if (std::abs(v) < gstep * 1e-9) v = 0.0;  // keep the lambda-hat = 0 row exact
        grid.push_back(v);
    }

    const json ej = section(sec, "estimator");
    infofit::EstimatorConfig est = estimator_from_config(ej, "toy_sweep.estimator");
    const std::string est_kind = ej.value("kind", std::string("lnc"));
    if (est_kind != "lnc" && est_kind != "ksg")
        throw ConfigError("toy_sweep.estimator.kind must be 'lnc' or 'ksg'");

    json cases = sec.contains("cases") ? sec.at("cases") : json::array();
    if (cases.empty()) {
        cases = json::array({json{{"a", 3.0}, {"lambda", 2.0}, {"forms", json::array({"linear"})}}});
    }

    const int threads = resolve_threads(threads_flag, sec);
    fs::create_directories(out_dir);

    for (const json& c : cases) {
        check_keys(c, {"a", "lambda", "forms"}, "toy_sweep.cases[]");
        const double a = c.value("a", 3.0);
        const double lambda = c.value("lambda", 2.0);
        std::vector<std::string> forms = {"linear", "exponential", "sinusoidal"};
        if (c.contains("forms")) forms = c.at("forms").get<std::vector<std::string>>();

        for (const std::string& form_name : forms) {
            infofit::ToyConfig toy;
            toy.form = infofit::toy_form_from_string(form_name);
            toy.a = a;
            toy.lambda_true = lambda;
            toy.noise_std = noise_std;
            toy.seed = seed;
            toy.t_grid = linspace(t_min, t_max, n_samples);
            const infofit::ToySeries series = infofit::toy_generate(toy);
            const infofit::SampleSet z = infofit::SampleSet::from_vector(series.z);

            auto eval = [&](double lambda_hat) {
                const auto candidate = infofit::toy_candidate(lambda_hat, toy.t_grid);
                const infofit::SampleSet yhat = infofit::SampleSet::from_vector(candidate);
                infofit::ObjectiveValue v;
                v.kind = infofit::ObjectiveKind::mi;
                v.value_nats = (est_kind == "lnc" ? infofit::mi_lnc(yhat, z, est)
                                                  : infofit::mi_ksg(yhat, z, est))
                                   .value_nats;
                v.fc = std::numeric_limits<double>::quiet_NaN();
                return v;
            };
            infofit::SweepCurve curve =
                infofit::sweep_grid(grid, eval, infofit::Direction::maximize, threads);

            const std::string name = "toy_sweep_" + form_name + "_a" + format_compact(a) + "_l" +
                                     format_compact(lambda) + ".csv";
            write_curve_csv(fs::path(out_dir) / name, curve, cfg.hash_hex,
                            {"lambda_true=" + infofit::format_double(lambda),
                             "a=" + infofit::format_double(a), "form=" + form_name,
                             "estimator=" + est_kind});
            std::cout << name << ": argmax=" << curve.best_param() << " (true " << lambda << ")\n";
        }
    }
    return 0;
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const LoadedConfig& cfg, const std::string& dataset_dir, const std::string& out_dir,
              int threads_flag, double step_flag) {
    const json sec = section(cfg.doc, "sweep");
    check_keys(sec, {"objectives", "params", "grid_factors", "grids", "estimator",
                     "kl_prior_reference", "step", "threads"},
               "sweep");

    const infofit::Dataset data = infofit::load_dataset(dataset_dir);
    const double step = step_flag > 0 ? step_flag : sec.value("step", data.step);
    const int threads = resolve_threads(threads_flag, sec);

    std::vector<std::string> objectives = {"mi", "kl_prior", "kl_disjoint"};
    if (sec.contains("objectives")) objectives = sec.at("objectives").get<std::vector<std::string>>();
    std::vector<std::string> params = {"k_w", "k_r", "k_b", "B_max", "rho"};
    if (sec.contains("params")) params = sec.at("params").get<std::vector<std::string>>();

    std::vector<double> factors = {0.5, 0.7, 1.0, 1.4, 2.0};
    if (sec.contains("grid_factors")) factors = sec.at("grid_factors").get<std::vector<double>>();

    const infofit::EstimatorConfig est =
        estimator_from_config(section(sec, "estimator"), "sweep.estimator");
    const std::string ref_kind = sec.value("kl_prior_reference", std::string("samples"));
    if (ref_kind != "samples" && ref_kind != "gaussian")
        throw ConfigError("sweep.kl_prior_reference must be 'samples' or 'gaussian'");

    fs::create_directories(out_dir);

    for (const std::string& kind_name : objectives) {
        infofit::ObjectiveSpec spec;
        spec.kind = infofit::objective_kind_from_string(kind_name);
        spec.estimator = est;
        if (spec.kind == infofit::ObjectiveKind::kl_prior) {
            spec.reference = ref_kind == "samples"
                                 ? infofit::reference_from_dataset(data)
                                 : infofit::gaussian_reference_from_dataset(data);
        }

        for (const std::string& param : params) {
            infofit::SweepSpec sweep;
            sweep.param_name = param;
            sweep.objective = spec;
            sweep.base = data.gen_params;

            infofit::CogParams probe = data.gen_params;
            const double base_value = *infofit::cog_param_field(probe, param);
            if (sec.contains("grids") && sec.at("grids").contains(param)) {
                sweep.grid = sec.at("grids").at(param).get<std::vector<double>>();
            } else if (param == "rho") {
                sweep.grid = {0.25, 0.35, 0.5, 0.7, 0.9};
            } else {
                for (double f : factors) sweep.grid.push_back(base_value * f);
            }

            const infofit::SweepCurve curve = infofit::run_sweep(sweep, data, step, threads);
            const std::string name = "sweep_" + kind_name + "_" + param + ".csv";
            write_curve_csv(fs::path(out_dir) / name, curve, cfg.hash_hex,
                            {"objective=" + kind_name, "param=" + param,
                             "generating_value=" + infofit::format_double(base_value),
                             "direction=" + std::string(spec.direction() ==
                                                                infofit::Direction::maximize
                                                            ? "maximize"
                                                            : "minimize")});
            std::cout << name << ": best " << param << "=" << curve.best_param() << " (generating "
                      << base_value << ")\n";
        }
    }
    return 0;
}

// --------------------------------------------------------------------- fit

struct FitTransform {
    // log-space for the strictly positive parameters, raw for rho
    std::vector<std::string> names = {"k_w", "k_r", "k_b", "K_A", "K_B", "B_max", "rho"};

    Eigen::VectorXd encode(const infofit::CogParams& p) const {
        infofit::CogParams copy = p;
        Eigen::VectorXd z(7);
        for (int i = 0; i < 6; ++i) z(i) = std::log(*infofit::cog_param_field(copy, names[static_cast<std::size_t>(i)]));
        z(6) = p.rho;
        return z;
    }

    infofit::CogParams decode(const Eigen::VectorXd& z, const infofit::CogParams& base) const {
        infofit::CogParams p = base;
        for (int i = 0; i < 6; ++i)
            *infofit::cog_param_field(p, names[static_cast<std::size_t>(i)]) = std::exp(z(i));
        p.rho = z(6);
        p.B0_init = std::min(p.B0_init, p.B_max);
        return p;
    }
};

int run_spsa_selftest() {
    using namespace infofit;
    bool ok = true;

    {
        Eigen::VectorXd target(5);
        target << 1.0, -0.5, 2.0, 0.3, -1.2;
        SpsaConfig cfg;
        cfg.iterations = 2000;
        cfg.seed = 17;
        cfg.bounds.assign(5, {-10.0, 10.0});
        auto result = spsa_minimize(
            [&](const Eigen::VectorXd& x) { return ProbeEval{(x - target).squaredNorm(), 1.0}; },
            Eigen::VectorXd::Zero(5), cfg);
        const double err = (result.x_best - target).norm();
        const bool pass = err <= 1e-2 && result.n_evals == 2 * cfg.iterations;
        std::cout << "selftest quadratic: err=" << err << " evals=" << result.n_evals << " "
                  << (pass ? "PASS" : "FAIL") << "\n";
        ok = ok && pass;
    }
    {
        SpsaConfig cfg;
        cfg.iterations = 3000;
        cfg.seed = 23;
        cfg.penalty_weight = 100.0;
        cfg.bounds.assign(1, {-10.0, 10.0});
        Eigen::VectorXd x0(1);
        x0 << 5.0;
        auto result = spsa_minimize(
            [](const Eigen::VectorXd& x) { return ProbeEval{x(0) * x(0), x(0) - 1.0}; }, x0, cfg);
        const bool pass = std::abs(result.x_best(0) - 1.0) <= 0.05;
        std::cout << "selftest penalty: x=" << result.x_best(0) << " "
                  << (pass ? "PASS" : "FAIL") << "\n";
        ok = ok && pass;
    }
    return ok ? 0 : 1;
}

int cmd_fit(const LoadedConfig& cfg, const std::string& dataset_dir, const std::string& out_dir,
            int iterations_flag, long seed_flag, double step_flag, bool selftest,
            int threads_flag) {
    if (selftest) return run_spsa_selftest();
    (void)threads_flag;

    const json sec = section(cfg.doc, "fit");
    check_keys(sec, {"objective", "iterations", "seed", "a", "c", "A_stab", "alpha_gain",
                     "gamma_gain", "penalty_weight", "init", "step", "bounds", "estimator"},
               "fit");

    const infofit::Dataset data = infofit::load_dataset(dataset_dir);
    const double step = step_flag > 0 ? step_flag : sec.value("step", data.step);

    const std::string objective_name = sec.value("objective", std::string("mi"));
    infofit::ObjectiveSpec spec;
    spec.kind = infofit::objective_kind_from_string(objective_name);
    spec.estimator = estimator_from_config(section(sec, "estimator"), "fit.estimator");
    if (spec.kind == infofit::ObjectiveKind::kl_prior)
        spec.reference = infofit::reference_from_dataset(data);

    infofit::SpsaConfig spsa;
    spsa.iterations = iterations_flag >= 0 ? iterations_flag : sec.value("iterations", 150);
    spsa.seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : sec.value("seed", 7ull);
    spsa.a = sec.value("a", spsa.a);
    spsa.c = sec.value("c", spsa.c);
    spsa.A_stab = sec.value("A_stab", spsa.A_stab);
    spsa.alpha_gain = sec.value("alpha_gain", spsa.alpha_gain);
    spsa.gamma_gain = sec.value("gamma_gain", spsa.gamma_gain);
    spsa.penalty_weight = sec.value("penalty_weight", spsa.penalty_weight);

    // starting point
    const json ij = section(sec, "init");
    check_keys(ij, {"mode", "factor", "params"}, "fit.init");
    const std::string init_mode = ij.value("mode", std::string("perturb"));
    infofit::CogParams start = data.gen_params;
    if (init_mode == "perturb") {
        const double factor = ij.value("factor", 2.0);
        for (const char* name : {"k_w", "k_r", "k_b", "K_A", "K_B", "B_max"})
            *infofit::cog_param_field(start, name) *= factor;
        start.B0_init = std::min(start.B0_init, start.B_max);
    } else if (init_mode == "explicit") {
        start = cog_from_config(section(ij, "params"), "fit.init.params");
    } else {
        throw ConfigError("fit.init.mode must be 'perturb' or 'explicit'");
    }
    start.validate();

    const FitTransform transform;
    const Eigen::VectorXd x0 = transform.encode(start);

    // optimizer-space bounds: defaults base*[0.1, 10] (log), rho in [0.05, 0.95]
    spsa.bounds.assign(7, {0.0, 0.0});
    infofit::CogParams base = data.gen_params;
    for (int i = 0; i < 6; ++i) {
        const double b = *infofit::cog_param_field(base, transform.names[static_cast<std::size_t>(i)]);
        spsa.bounds[static_cast<std::size_t>(i)] = {std::log(b * 0.1), std::log(b * 10.0)};
    }
    spsa.bounds[6] = {0.05, 0.95};
    if (sec.contains("bounds")) {
        const json& bj = sec.at("bounds");
        check_keys(bj, transform.names, "fit.bounds");
        for (std::size_t i = 0; i < transform.names.size(); ++i) {
            if (!bj.contains(transform.names[i])) continue;
            const auto raw = bj.at(transform.names[i]).get<std::vector<double>>();
            if (raw.size() != 2) throw ConfigError("fit.bounds entries must be [lo, hi]");
            if (i < 6) {
                if (!(raw[0] > 0.0)) throw ConfigError("fit.bounds for positive parameters need lo > 0");
                spsa.bounds[i] = {std::log(raw[0]), std::log(raw[1])};
            } else {
                spsa.bounds[i] = {raw[0], raw[1]};
            }
        }
    }

    const double sign = spec.direction() == infofit::Direction::maximize ? -1.0 : 1.0;
    auto evaluate = [&](const Eigen::VectorXd& z) {
        const infofit::CogParams candidate = transform.decode(z, data.gen_params);
        const infofit::ObjectiveValue v = infofit::evaluate_objective(spec, data, candidate, step);
        return infofit::ProbeEval{sign * v.value_nats, v.fc};
    };

    const infofit::SpsaResult result = infofit::spsa_minimize(evaluate, x0, spsa);
    const infofit::CogParams fitted = transform.decode(result.x_best, data.gen_params);

    fs::create_directories(out_dir);
    {
        infofit::CsvWriter csv(fs::path(out_dir) / "history.csv");
        csv.comment(std::string("infofit ") + infofit::kVersion + " config_hash=" + cfg.hash_hex);
        csv.header({"iteration", "k_w", "k_r", "k_b", "K_A", "K_B", "B_max", "rho", "objective",
                    "fc", "feasible"});
        for (const auto& row : result.history) {
            const infofit::CogParams p = transform.decode(row.x, data.gen_params);
            csv.row(static_cast<long>(row.iteration), p.k_w, p.k_r, p.k_b, p.K_A, p.K_B, p.B_max,
                    p.rho, sign * row.objective, row.fc, row.feasible ? 1L : 0L);
        }
    }
    {
        json out;
        out["schema_version"] = 1;
        out["objective"] = objective_name;
        out["value_nats"] = result.evaluated ? json(sign * result.best_loss) : json();
        out["fc"] = result.evaluated ? json(result.best_fc) : json();
        out["feasible"] = result.best_feasible;
        out["iterations"] = spsa.iterations;
        out["n_evals"] = result.n_evals;
        out["params"] = cog_to_config(fitted);
        out["start_params"] = cog_to_config(start);
        std::ofstream jf(fs::path(out_dir) / "fitted.json");
        jf << out.dump(2) << "\n";
    }
    std::cout << "fit finished: " << spsa.iterations << " iterations, " << result.n_evals
              << " objective evaluations\n";
    if (result.evaluated)
        std::cout << "  best " << objective_name << " = " << sign * result.best_loss
                  << " nats, fc = " << result.best_fc << (result.best_feasible ? "" : " (infeasible)")
                  << "\n";
    return 0;
}

// ---------------------------------------------------------------- estimate

Eigen::MatrixXd read_matrix_csv(const std::string& path, std::vector<std::vector<std::string>>* raw_rows = nullptr) {
    infofit::CsvReader csv(path);
    const auto& rows = csv.rows();
    if (rows.empty()) throw ConfigError("no data rows in " + path);
    const std::size_t cols = csv.header().size();
    Eigen::MatrixXd m(static_cast<long>(rows.size()), static_cast<long>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ConfigError("ragged CSV row in " + path);
        for (std::size_t c = 0; c < cols; ++c) {
            try {
                m(static_cast<long>(r), static_cast<long>(c)) = std::stod(rows[r][c]);
            } catch (const std::exception&) {
                throw ConfigError("non-numeric value '" + rows[r][c] + "' in " + path);
            }
        }
    }
    if (raw_rows) *raw_rows = rows;
    return m;
}

int cmd_estimate(const std::string& input, const std::string& input2, const std::string& kind,
                 int xdim, int k, double lnc_alpha, long seed, bool bits, double mu, double sigma) {
    infofit::EstimatorConfig cfg;
    if (k > 0) cfg.k = k;
    if (lnc_alpha > 0) cfg.lnc_alpha = lnc_alpha;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);

    const Eigen::MatrixXd m = read_matrix_csv(input);
    infofit::EstimatorResult result;

    if (kind == "entropy") {
        result = infofit::entropy_knn(infofit::SampleSet(m), cfg);
    } else if (kind == "mi" || kind == "mi-lnc") {
        if (m.cols() < 2) throw ConfigError("mi needs at least two columns");
        if (xdim < 1 || xdim >= m.cols()) throw ConfigError("--xdim out of range");
        const infofit::SampleSet x(m.leftCols(xdim));
        const infofit::SampleSet y(m.rightCols(m.cols() - xdim));
        result = kind == "mi" ? infofit::mi_ksg(x, y, cfg) : infofit::mi_lnc(x, y, cfg);
    } else if (kind == "mi-mixed") {
        if (m.cols() < 2) throw ConfigError("mi-mixed needs value columns plus a label column");
        infofit::LabeledSampleSet s;
        s.values = m.leftCols(m.cols() - 1);
        s.labels.resize(static_cast<std::size_t>(m.rows()));
        for (long i = 0; i < m.rows(); ++i) {
            const double label = m(i, m.cols() - 1);
            if (label != std::floor(label))
                throw ConfigError("labels in the last column must be integers");
            s.labels[static_cast<std::size_t>(i)] = static_cast<int>(label);
        }
        result = infofit::mi_mixed(s, cfg);
    } else if (kind == "kl") {
        if (input2.empty()) throw ConfigError("--kind kl needs --input2 for the Q samples");
        const Eigen::MatrixXd q = read_matrix_csv(input2);
        result = infofit::kl_knn(infofit::SampleSet(m), infofit::SampleSet(q), cfg);
    } else if (kind == "kl-gauss") {
        if (!(sigma > 0.0)) throw ConfigError("--kind kl-gauss needs --mu and --sigma > 0");
        result = infofit::kl_to_gaussian(infofit::SampleSet(m), mu, sigma, cfg);
    } else {
        throw ConfigError("unknown --kind: " + kind);
    }

    std::cout << infofit::to_json(result) << "\n";
    std::cout << "nats: " << infofit::format_double(result.value_nats) << "\n";
    if (bits)
        std::cout << "bits: " << infofit::format_double(result.value(infofit::Units::bits)) << "\n";
    return 0;
}

}  // namespace

// fixture generation uses the library's portable RNG helpers directly
namespace fixtures_impl {

using infofit::uniform01;

class Gauss {
  public:
    explicit Gauss(std::uint64_t seed) : rng_(seed) {}
    double operator()() {
        double u1 = uniform01(rng_);
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::mt19937_64 rng_;
};

void write_columns(const fs::path& path, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& cols, const std::string& note) {
    infofit::CsvWriter csv(path);
    csv.comment(std::string("infofit ") + infofit::kVersion + " " + note);
    csv.header(names);
    for (std::size_t r = 0; r < cols[0].size(); ++r) {
        if (cols.size() == 1) {
            csv.row(cols[0][r]);
        } else {
            csv.row(cols[0][r], cols[1][r]);
        }
    }
}

int run(const std::string& out_dir) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    {  // correlated Gaussian pair, rho = 0.9
        Gauss g(2024);
        const double rho = 0.9, tail = std::sqrt(1.0 - rho * rho);
        std::vector<double> x(2000), y(2000);
        for (std::size_t i = 0; i < 2000; ++i) {
            const double z1 = g(), z2 = g();
            x[i] = z1;
            y[i] = rho * z1 + tail * z2;
        }
        write_columns(dir / "gauss_mi_rho09_n2000.csv", {"x", "y"}, {x, y},
                      "bivariate normal rho=0.9 seed=2024");
    }
    {  // independent uniforms
        std::mt19937_64 rng(2025);
        std::vector<double> x(2000), y(2000);
        for (std::size_t i = 0; i < 2000; ++i) {
            x[i] = uniform01(rng);
            y[i] = uniform01(rng);
        }
        write_columns(dir / "indep_uniform_n2000.csv", {"x", "y"}, {x, y},
                      "independent uniforms seed=2025");
    }
    {  // entropy fixtures
        std::mt19937_64 rng(2026);
        std::vector<double> u(10000);
        for (auto& v : u) v = uniform01(rng);
        write_columns(dir / "uniform_n10000.csv", {"x"}, {u}, "uniform[0,1] seed=2026");
        Gauss g(2027);
        std::vector<double> gn(10000);
        for (auto& v : gn) v = g();
        write_columns(dir / "gauss_n10000.csv", {"x"}, {gn}, "standard normal seed=2027");
    }
    {  // KL fixtures
        Gauss gp(2028), gq(2029), gs(2030);
        std::vector<double> p(4000), q(4000), s(4000);
        for (std::size_t i = 0; i < 4000; ++i) {
            p[i] = gp();
            q[i] = 1.0 + gq();
            s[i] = 2.0 * gs();
        }
        write_columns(dir / "gauss_p_n4000.csv", {"x"}, {p}, "N(0,1) seed=2028");
        write_columns(dir / "gauss_q_shift_n4000.csv", {"x"}, {q}, "N(1,1) seed=2029");
        write_columns(dir / "gauss_q_scale_n4000.csv", {"x"}, {s}, "N(0,4) seed=2030");
    }
    {  // mixed MI fixture: median-threshold labels
        std::mt19937_64 rng(2031);
        std::vector<double> v(4000);
        for (auto& x : v) x = uniform01(rng);
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        const double median = 0.5 * (sorted[1999] + sorted[2000]);
        std::vector<double> labels(4000);
        for (std::size_t i = 0; i < 4000; ++i) labels[i] = v[i] > median ? 1.0 : 0.0;
        write_columns(dir / "mixed_median_n4000.csv", {"value", "label"}, {v, labels},
                      "uniform values, label = above median, seed=2031");
    }

    std::cout << "wrote fixtures to " << out_dir << "\n";
    return 0;
}

}  // namespace fixtures_impl

int main(int argc, char** argv) {
    CLI::App app{"information-theoretic fitting of hidden-layer dynamical models"};
    app.require_subcommand(1);

    std::string config_path, out_dir, dataset_dir;
    int n_series = 0, n_tasks = 0, iterations = -1, threads = 0, xdim = 1, k = 0;
    long seed = -1;
    double step = 0.0, lnc_alpha = 0.0, mu = 0.0, sigma = 0.0;
    bool selftest = false, bits = false;
    std::string input, input2, kind = "mi";

    auto* gen = app.add_subcommand("generate", "generate a synthetic outcome dataset");
    gen->add_option("--config", config_path, "experiment config (JSON)");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--n-series", n_series, "override series count");
    gen->add_option("--n-tasks", n_tasks, "override tasks per series");
    gen->add_option("--seed", seed, "override master seed");
    gen->add_option("--step", step, "override integration step");
    int trace_stride = 0;
    gen->add_option("--trace-stride", trace_stride,
                    "also write series_NNN_trajectory.csv sampling every n-th step");

    auto* toy = app.add_subcommand("toy-sweep", "lambda sweep on the three-layer toy family");
    toy->add_option("--config", config_path, "experiment config (JSON)");
    toy->add_option("--out", out_dir, "output directory");
    toy->add_option("--seed", seed, "override toy data seed");
    toy->add_option("--threads", threads, "sweep worker threads");

    auto* sw = app.add_subcommand("sweep", "one-at-a-time objective landscapes on a dataset");
    sw->add_option("--config", config_path, "experiment config (JSON)");
    sw->add_option("--dataset", dataset_dir, "dataset directory")->required();
    sw->add_option("--out", out_dir, "output directory");
    sw->add_option("--threads", threads, "sweep worker threads");
    sw->add_option("--step", step, "override integration step");

    auto* fit = app.add_subcommand("fit", "SPSA fit of the resource model on a dataset");
    fit->add_option("--config", config_path, "experiment config (JSON)");
    fit->add_option("--dataset", dataset_dir, "dataset directory");
    fit->add_option("--out", out_dir, "output directory");
    fit->add_option("--iterations", iterations, "override iteration count");
    fit->add_option("--seed", seed, "override SPSA seed");
    fit->add_option("--step", step, "override integration step");
    fit->add_flag("--selftest", selftest, "run the optimizer oracle fixtures and exit");

    auto* est = app.add_subcommand("estimate", "run an estimator on CSV samples");
    est->add_option("--input", input, "CSV with samples")->required();
    est->add_option("--input2", input2, "second CSV (Q samples for --kind kl)");
    est->add_option("--kind", kind, "entropy | mi | mi-lnc | mi-mixed | kl | kl-gauss");
    est->add_option("--xdim", xdim, "columns belonging to X for mi kinds");
    est->add_option("--k", k, "neighbor count");
    est->add_option("--lnc-alpha", lnc_alpha, "LNC threshold");
    est->add_option("--seed", seed, "jitter seed");
    est->add_option("--mu", mu, "Gaussian reference mean (kl-gauss)");
    est->add_option("--sigma", sigma, "Gaussian reference sigma (kl-gauss)");
    est->add_flag("--bits", bits, "also print the value in bits");

    auto* fx = app.add_subcommand("fixtures", "regenerate the analytic oracle fixture CSVs");
    fx->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            const LoadedConfig cfg = load_config(config_path);
            return cmd_generate(cfg, resolve_out(out_dir), n_series, n_tasks, seed, step, trace_stride);
        }
        if (toy->parsed()) {
            const LoadedConfig cfg = load_config(config_path);
            return cmd_toy_sweep(cfg, resolve_out(out_dir), seed, threads);
        }
        if (sw->parsed()) {
            const LoadedConfig cfg = load_config(config_path);
            return cmd_sweep(cfg, dataset_dir, resolve_out(out_dir), threads, step);
        }
        if (fit->parsed()) {
            const LoadedConfig cfg = load_config(config_path);
            if (!selftest && dataset_dir.empty())
                throw ConfigError("fit needs --dataset (or --selftest)");
            return cmd_fit(cfg, dataset_dir, selftest ? "" : resolve_out(out_dir), iterations,
                           seed, step, selftest, threads);
        }
        if (est->parsed()) {
            return cmd_estimate(input, input2, kind, xdim, k, lnc_alpha, seed, bits, mu, sigma);
        }
        if (fx->parsed()) {
            return fixtures_impl::run(resolve_out(out_dir));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
