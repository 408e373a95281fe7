#pragma once

#include <array>
#include <Eigen/Core>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "infofit/objectives.hpp"

namespace infofit {

struct SweepCurve {
    std::vector<double> grid;
    std::vector<double> values;          // objective, nats
    std::vector<double> fc;              // ordering constraint per point
    std::vector<std::string> errors;     // per-point failure reason; empty = ok
    Direction direction = Direction::maximize;
    int argopt = -1;                     // index of the best valid point, -1 if none

    double best_param() const { return grid.at(static_cast<std::size_t>(argopt)); }
};

// One-at-a-time landscape scan over a single parameter.
struct SweepSpec {
    std::string param_name;  // a CogParams field
    std::vector<double> grid;
    ObjectiveSpec objective;
    CogParams base;

    void validate() const;
};

// Pointer to the named CogParams field; nullptr when the name is unknown.
double* cog_param_field(CogParams& p, const std::string& name);
const std::vector<std::string>& cog_param_names();

// Evaluates eval_at over the grid, fanning points across `threads` workers.
// Results are stored by grid index, so parallel and serial runs agree
// exactly. Per-point exceptions are recorded in `errors`, not rethrown.
SweepCurve sweep_grid(const std::vector<double>& grid,
                      const std::function<ObjectiveValue(double)>& eval_at, Direction dir,
                      int threads = 1);

SweepCurve run_sweep(const SweepSpec& spec, const Dataset& data, double step, int threads = 1);

// Simultaneous perturbation stochastic approximation with box projection
// and a quadratic penalty on the ordering constraint.
struct SpsaConfig {
    double a = 0.1;
    double c = 0.05;
    double A_stab = -1.0;  // < 0: defaults to 0.1 * iterations
    double alpha_gain = 0.602;
    double gamma_gain = 0.101;
    int iterations = 0;
    double penalty_weight = 10.0;
    std::uint64_t seed = 0;
    std::vector<std::array<double, 2>> bounds;  // per-coordinate [lo, hi]

    void validate(long dims) const;
};

// loss is minimized and unpenalized; fc >= 0 means feasible.
struct ProbeEval {
    double loss = 0.0;
    double fc = 0.0;
};

using SpsaEvaluator = std::function<ProbeEval(const Eigen::VectorXd&)>;

struct SpsaHistoryRow {
    int iteration = 0;
    Eigen::VectorXd x;       // iterate before the update
    double objective = 0.0;  // mean unpenalized loss of the two probes
    double fc = 0.0;         // mean constraint of the two probes
    bool feasible = false;
};

struct SpsaResult {
    Eigen::VectorXd x_best;
    double best_loss = 0.0;
    double best_fc = 0.0;
    bool best_feasible = false;
    bool evaluated = false;  // false when iterations == 0
    std::vector<SpsaHistoryRow> history;
    long n_evals = 0;
};

// Exactly two evaluator calls per iteration. Best-seen tracking ranks the
// iterates by the mean of their two probe evaluations: feasible iterates by
// unpenalized loss, with the least-violating iterate as fallback when
// nothing is feasible.
SpsaResult spsa_minimize(const SpsaEvaluator& evaluate, const Eigen::VectorXd& x0,
                         const SpsaConfig& cfg);

namespace detail {
// +-1 per coordinate, one raw engine draw per coordinate.
Eigen::VectorXd rademacher(std::mt19937_64& rng, long dims);
}  // namespace detail

}  // namespace infofit
