// Python bindings for the core operations: estimators, the toy family and
// resource model, dataset generation, objectives, sweeps and SPSA.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>

#include "infofit/common.hpp"
#include "infofit/datagen.hpp"
#include "infofit/dynamics.hpp"
#include "infofit/estimators.hpp"
#include "infofit/objectives.hpp"
#include "infofit/optimize.hpp"

namespace py = pybind11;
using namespace infofit;

namespace {

EstimatorConfig make_cfg(int k, double lnc_alpha, double jitter_scale, std::uint64_t seed) {
    EstimatorConfig cfg;
    cfg.k = k;
    cfg.lnc_alpha = lnc_alpha;
    cfg.jitter_scale = jitter_scale;
    cfg.seed = seed;
    return cfg;
}

SampleSet to_samples(const Eigen::MatrixXd& m) { return SampleSet(m); }

TaskSchedule to_schedule(const std::vector<std::pair<std::string, double>>& phases) {
    TaskSchedule sched;
    sched.phases.reserve(phases.size());
    for (const auto& [kind, duration] : phases) {
        if (kind != "on" && kind != "off") throw ConfigError("phase kind must be 'on' or 'off'");
        sched.phases.push_back({kind == "on" ? PhaseKind::on : PhaseKind::off, duration});
    }
    sched.validate();
    return sched;
}

std::vector<std::pair<std::string, double>> from_schedule(const TaskSchedule& sched) {
    std::vector<std::pair<std::string, double>> out;
    out.reserve(sched.phases.size());
    for (const auto& ph : sched.phases)
        out.emplace_back(ph.kind == PhaseKind::on ? "on" : "off", ph.duration);
    return out;
}

ObjectiveSpec make_objective_spec(const std::string& kind, const EstimatorConfig& est,
                                  bool pool_series, const Dataset& data,
                                  const std::string& reference) {
    ObjectiveSpec spec;
    spec.kind = objective_kind_from_string(kind);
    spec.estimator = est;
    spec.pool_series = pool_series;
    if (spec.kind == ObjectiveKind::kl_prior) {
        if (reference == "samples") {
            spec.reference = reference_from_dataset(data);
        } else if (reference == "gaussian") {
            spec.reference = gaussian_reference_from_dataset(data);
        } else {
            throw ConfigError("reference must be 'samples' or 'gaussian'");
        }
    }
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "information-theoretic fitting of hidden-layer dynamical models";
    m.attr("__version__") = kVersion;

    py::register_exception<TooFewSamples>(m, "TooFewSamples", PyExc_ValueError);
    py::register_exception<LengthMismatch>(m, "LengthMismatch", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<NonPositiveSigma>(m, "NonPositiveSigma", PyExc_ValueError);
    py::register_exception<SingularTime>(m, "SingularTime", PyExc_ValueError);
    py::register_exception<NonFiniteState>(m, "NonFiniteState", PyExc_RuntimeError);
    py::register_exception<DegeneratePool>(m, "DegeneratePool", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<EstimatorResult>(m, "EstimatorResult")
        .def_readonly("value_nats", &EstimatorResult::value_nats)
        .def_readonly("raw_nats", &EstimatorResult::raw_nats)
        .def_readonly("k", &EstimatorResult::k)
        .def_readonly("n", &EstimatorResult::n)
        .def_readonly("flags", &EstimatorResult::flags)
        .def("value_bits", [](const EstimatorResult& r) { return r.value(Units::bits); })
        .def("__repr__", [](const EstimatorResult& r) { return to_json(r); });

    const auto est_args = [](auto f) { return f; };
    (void)est_args;

    m.def(
        "entropy_knn",
        [](const Eigen::MatrixXd& s, int k, double lnc_alpha, double jitter_scale,
           std::uint64_t seed) {
            return entropy_knn(to_samples(s), make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("samples"), py::arg("k") = 3, py::arg("lnc_alpha") = 0.05,
        py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "Kozachenko-Leonenko differential entropy (nats, Chebyshev metric)");

    m.def(
        "mi_ksg",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int k, double lnc_alpha,
           double jitter_scale, std::uint64_t seed) {
            return mi_ksg(to_samples(x), to_samples(y), make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3, py::arg("lnc_alpha") = 0.05,
        py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "Kraskov mutual information (nats)");

    m.def(
        "mi_lnc",
        [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int k, double lnc_alpha,
           double jitter_scale, std::uint64_t seed) {
            return mi_lnc(to_samples(x), to_samples(y), make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("x"), py::arg("y"), py::arg("k") = 3, py::arg("lnc_alpha") = 0.05,
        py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "Kraskov mutual information with local non-uniformity correction (nats)");

    m.def(
        "mi_mixed",
        [](const Eigen::MatrixXd& values, const std::vector<int>& labels, int k, double lnc_alpha,
           double jitter_scale, std::uint64_t seed) {
            LabeledSampleSet s;
            s.values = values;
            s.labels = labels;
            return mi_mixed(s, make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("values"), py::arg("labels"), py::arg("k") = 3, py::arg("lnc_alpha") = 0.05,
        py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "Mixed discrete-continuous mutual information (nats)");

    m.def(
        "kl_knn",
        [](const Eigen::MatrixXd& p, const Eigen::MatrixXd& q, int k, double lnc_alpha,
           double jitter_scale, std::uint64_t seed) {
            return kl_knn(to_samples(p), to_samples(q), make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("p"), py::arg("q"), py::arg("k") = 3, py::arg("lnc_alpha") = 0.05,
        py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "Nearest-neighbor KL divergence D(P||Q) (nats)");

    m.def(
        "kl_to_gaussian",
        [](const Eigen::MatrixXd& p, double mu, double sigma, int k, double lnc_alpha,
           double jitter_scale, std::uint64_t seed) {
            return kl_to_gaussian(to_samples(p), mu, sigma,
                                  make_cfg(k, lnc_alpha, jitter_scale, seed));
        },
        py::arg("p"), py::arg("mu"), py::arg("sigma"), py::arg("k") = 3,
        py::arg("lnc_alpha") = 0.05, py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        "KL divergence against an explicit Gaussian reference (nats)");

    // dynamics
    py::class_<CogParams>(m, "CogParams")
        .def(py::init<>())
        .def_readwrite("k_w", &CogParams::k_w)
        .def_readwrite("k_r", &CogParams::k_r)
        .def_readwrite("k_b", &CogParams::k_b)
        .def_readwrite("K_A", &CogParams::K_A)
        .def_readwrite("K_B", &CogParams::K_B)
        .def_readwrite("B_max", &CogParams::B_max)
        .def_readwrite("rho", &CogParams::rho)
        .def_readwrite("A0_init", &CogParams::A0_init)
        .def_readwrite("B0_init", &CogParams::B0_init)
        .def_readwrite("t_start", &CogParams::t_start)
        .def("validate", &CogParams::validate);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("A", &Trajectory::A)
        .def_readonly("B", &Trajectory::B)
        .def_readonly("a_end", &Trajectory::a_end)
        .def_readonly("t_end", &Trajectory::t_end)
        .def_readonly("clamp_events", &Trajectory::clamp_events);

    m.def(
        "toy_generate",
        [](double lambda_true, double a, const std::string& form,
           const std::vector<double>& t_grid, double noise_std, std::uint64_t seed) {
            ToyConfig cfg;
            cfg.lambda_true = lambda_true;
            cfg.a = a;
            cfg.form = toy_form_from_string(form);
            cfg.t_grid = t_grid;
            cfg.noise_std = noise_std;
            cfg.seed = seed;
            ToySeries s = toy_generate(cfg);
            return py::make_tuple(s.x, s.y, s.z);
        },
        py::arg("lambda_true"), py::arg("a"), py::arg("form"), py::arg("t_grid"),
        py::arg("noise_std") = 1e-8, py::arg("seed") = 0,
        "Generate the three-layer toy series (x, y, z)");

    m.def("toy_candidate", &toy_candidate, py::arg("lambda_hat"), py::arg("t_grid"),
          "Candidate hidden series exp(-lambda_hat * t)");

    m.def(
        "cog_rhs",
        [](double A, double B, double t, bool on_task, const CogParams& p) {
            const Derivatives d = cog_rhs(A, B, t, on_task, p);
            return py::make_tuple(d.dA, d.dB);
        },
        py::arg("A"), py::arg("B"), py::arg("t"), py::arg("on_task"), py::arg("params"),
        "Resource model derivatives (dA, dB)");

    m.def(
        "integrate_schedule",
        [](const CogParams& p, const std::vector<std::pair<std::string, double>>& phases,
           double step, int trace_stride) {
            return integrate_schedule(p, to_schedule(phases), step, trace_stride);
        },
        py::arg("params"), py::arg("schedule"), py::arg("step") = 0.01,
        py::arg("trace_stride") = 1,
        "Phase-aligned RK4 integration over an on/off schedule");

    // datagen
    py::class_<OutcomeModel>(m, "OutcomeModel")
        .def(py::init<>())
        .def_readwrite("alpha", &OutcomeModel::alpha)
        .def_readwrite("a_ref", &OutcomeModel::a_ref);

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("n_series",
                               [](const Dataset& d) { return d.series.size(); })
        .def_property_readonly("gen_params", [](const Dataset& d) { return d.gen_params; })
        .def_property_readonly("outcome_model", [](const Dataset& d) { return d.outcome_model; })
        .def_property_readonly("calibrated", [](const Dataset& d) { return d.calibrated; })
        .def("total_tasks", &Dataset::total_tasks)
        .def("success_rate", &Dataset::success_rate)
        .def("pooled_a_end_true", &Dataset::pooled_a_end_true)
        .def("pooled_outcomes", &Dataset::pooled_outcomes)
        .def("schedule",
             [](const Dataset& d, std::size_t i) { return from_schedule(d.series.at(i).schedule); },
             py::arg("series"));

    m.def(
        "sample_schedule",
        [](int n_tasks, double lambda_on, double lambda_off, double lambda_break, int break_every,
           std::uint64_t seed) {
            ScheduleGenConfig cfg;
            cfg.n_tasks = n_tasks;
            cfg.lambda_on = lambda_on;
            cfg.lambda_off = lambda_off;
            cfg.lambda_break = lambda_break;
            cfg.break_every = break_every;
            return from_schedule(sample_schedule(cfg, seed));
        },
        py::arg("n_tasks"), py::arg("lambda_on") = 0.25, py::arg("lambda_off") = 0.25,
        py::arg("lambda_break") = 1.0 / 40.0, py::arg("break_every") = 10, py::arg("seed") = 0,
        "Sample an alternating on/off schedule with exponential durations");

    m.def("sample_outcomes", &sample_outcomes, py::arg("a_end"), py::arg("model"),
          py::arg("seed") = 0, "Bernoulli outcomes through the logistic link");

    m.def("success_probability", &success_probability, py::arg("a_end"), py::arg("model"));

    m.def("calibrate_outcome_model", &calibrate_outcome_model, py::arg("a_end_pool"),
          py::arg("p_high") = 0.7, py::arg("q_high") = 0.8,
          "Calibrate the logistic link to a pool of resource values");

    m.def(
        "generate_dataset",
        [](const CogParams& cog, int n_series, int n_tasks, std::uint64_t master_seed, double step,
           const std::optional<OutcomeModel>& outcome_model, double lambda_on, double lambda_off,
           double lambda_break, int break_every, double p_high, double q_high) {
            ScheduleGenConfig sched;
            sched.n_tasks = n_tasks;
            sched.lambda_on = lambda_on;
            sched.lambda_off = lambda_off;
            sched.lambda_break = lambda_break;
            sched.break_every = break_every;
            return generate_dataset(cog, sched, n_series, outcome_model, master_seed, step, p_high,
                                    q_high);
        },
        py::arg("params"), py::arg("n_series") = 5, py::arg("n_tasks") = 300,
        py::arg("master_seed") = 1, py::arg("step") = 0.01,
        py::arg("outcome_model") = std::nullopt, py::arg("lambda_on") = 0.25,
        py::arg("lambda_off") = 0.25, py::arg("lambda_break") = 1.0 / 40.0,
        py::arg("break_every") = 10, py::arg("p_high") = 0.7, py::arg("q_high") = 0.8,
        "Generate a synthetic outcome dataset (calibrated unless a model is given)");

    m.def("save_dataset",
          [](const Dataset& d, const std::string& dir) { save_dataset(d, dir); },
          py::arg("dataset"), py::arg("directory"));
    m.def("load_dataset",
          [](const std::string& dir) { return load_dataset(dir); }, py::arg("directory"));

    // objectives
    py::class_<ObjectiveValue>(m, "ObjectiveValue")
        .def_readonly("value_nats", &ObjectiveValue::value_nats)
        .def_readonly("fc", &ObjectiveValue::fc)
        .def_readonly("n_correct", &ObjectiveValue::n_correct)
        .def_readonly("n_incorrect", &ObjectiveValue::n_incorrect)
        .def_readonly("flags", &ObjectiveValue::flags)
        .def("__repr__", [](const ObjectiveValue& v) { return to_json(v); });

    m.def(
        "evaluate_objective",
        [](const std::string& kind, const Dataset& data, const CogParams& candidate, double step,
           int k, double jitter_scale, std::uint64_t seed, bool pool_series,
           const std::string& reference) {
            const EstimatorConfig est = make_cfg(k, 0.05, jitter_scale, seed);
            const ObjectiveSpec spec = make_objective_spec(kind, est, pool_series, data, reference);
            return evaluate_objective(spec, data, candidate, step);
        },
        py::arg("kind"), py::arg("dataset"), py::arg("candidate"), py::arg("step") = 0.01,
        py::arg("k") = 3, py::arg("jitter_scale") = 1e-10, py::arg("seed") = 0,
        py::arg("pool_series") = true, py::arg("reference") = "samples",
        "Evaluate mi / kl_prior / kl_disjoint for a candidate parameter set");

    m.def("constraint_fc",
          [](const std::vector<double>& a_end, const std::vector<int>& outcomes) {
              return constraint_fc(a_end, outcomes);
          },
          py::arg("a_end"), py::arg("outcomes"),
          "Ordering constraint <A|correct> - <A|incorrect>");

    // sweeps and SPSA
    py::class_<SweepCurve>(m, "SweepCurve")
        .def_readonly("grid", &SweepCurve::grid)
        .def_readonly("values", &SweepCurve::values)
        .def_readonly("fc", &SweepCurve::fc)
        .def_readonly("errors", &SweepCurve::errors)
        .def_readonly("argopt", &SweepCurve::argopt)
        .def("best_param", &SweepCurve::best_param);

    m.def(
        "run_sweep",
        [](const std::string& param, const std::vector<double>& grid, const std::string& kind,
           const Dataset& data, double step, int threads, int k, std::uint64_t seed,
           const std::string& reference) {
            SweepSpec spec;
            spec.param_name = param;
            spec.grid = grid;
            spec.base = data.gen_params;
            const EstimatorConfig est = make_cfg(k, 0.05, 1e-10, seed);
            spec.objective = make_objective_spec(kind, est, true, data, reference);
            return run_sweep(spec, data, step, threads);
        },
        py::arg("param"), py::arg("grid"), py::arg("kind"), py::arg("dataset"),
        py::arg("step") = 0.01, py::arg("threads") = 1, py::arg("k") = 3, py::arg("seed") = 0,
        py::arg("reference") = "samples",
        "One-at-a-time objective landscape over a parameter grid");

    py::class_<SpsaResult>(m, "SpsaResult")
        .def_readonly("x_best", &SpsaResult::x_best)
        .def_readonly("best_loss", &SpsaResult::best_loss)
        .def_readonly("best_fc", &SpsaResult::best_fc)
        .def_readonly("best_feasible", &SpsaResult::best_feasible)
        .def_readonly("n_evals", &SpsaResult::n_evals)
        .def_property_readonly("history", [](const SpsaResult& r) {
            py::list rows;
            for (const auto& row : r.history) {
                py::dict d;
                d["iteration"] = row.iteration;
                d["x"] = row.x;
                d["objective"] = row.objective;
                d["fc"] = row.fc;
                d["feasible"] = row.feasible;
                rows.append(d);
            }
            return rows;
        });

    m.def(
        "spsa_minimize",
        [](const std::function<std::pair<double, double>(const Eigen::VectorXd&)>& evaluate,
           const Eigen::VectorXd& x0, int iterations, double a, double c, double A_stab,
           double alpha_gain, double gamma_gain, double penalty_weight, std::uint64_t seed,
           const std::vector<std::array<double, 2>>& bounds) {
            SpsaConfig cfg;
            cfg.iterations = iterations;
            cfg.a = a;
            cfg.c = c;
            cfg.A_stab = A_stab;
            cfg.alpha_gain = alpha_gain;
            cfg.gamma_gain = gamma_gain;
            cfg.penalty_weight = penalty_weight;
            cfg.seed = seed;
            cfg.bounds = bounds;
            auto wrapped = [&evaluate](const Eigen::VectorXd& x) {
                const auto [loss, fc] = evaluate(x);
                return ProbeEval{loss, fc};
            };
            return spsa_minimize(wrapped, x0, cfg);
        },
        py::arg("evaluate"), py::arg("x0"), py::arg("iterations"), py::arg("a") = 0.1,
        py::arg("c") = 0.05, py::arg("A_stab") = -1.0, py::arg("alpha_gain") = 0.602,
        py::arg("gamma_gain") = 0.101, py::arg("penalty_weight") = 10.0, py::arg("seed") = 0,
        py::arg("bounds") = std::vector<std::array<double, 2>>{},
        "SPSA with box projection; evaluate(x) returns (loss, fc)");
}
