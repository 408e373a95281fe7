#include "infofit/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "infofit/common.hpp"

namespace infofit {

void SweepSpec::validate() const {
    if (grid.empty()) throw ConfigError("sweep grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
    }
    CogParams probe = base;
    if (!cog_param_field(probe, param_name))
        throw ConfigError("unknown sweep parameter: " + param_name);
}

double* cog_param_field(CogParams& p, const std::string& name) {
    if (name == "k_w") return &p.k_w;
    if (name == "k_r") return &p.k_r;
    if (name == "k_b") return &p.k_b;
    if (name == "K_A") return &p.K_A;
    if (name == "K_B") return &p.K_B;
    if (name == "B_max") return &p.B_max;
    if (name == "rho") return &p.rho;
    if (name == "A0_init") return &p.A0_init;
    if (name == "B0_init") return &p.B0_init;
    if (name == "t_start") return &p.t_start;
    return nullptr;
}

const std::vector<std::string>& cog_param_names() {
    static const std::vector<std::string> names = {"k_w", "k_r", "k_b",     "K_A",    "K_B",
                                                   "B_max", "rho", "A0_init", "B0_init", "t_start"};
    return names;
}

namespace {

int resolve_argopt(const SweepCurve& curve) {
    int best = -1;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        if (!curve.errors[i].empty() || !std::isfinite(curve.values[i])) continue;
        if (best < 0) {
            best = static_cast<int>(i);
            continue;
        }
        const double v = curve.values[i];
        const double b = curve.values[static_cast<std::size_t>(best)];
        if (curve.direction == Direction::maximize ? v > b : v < b) best = static_cast<int>(i);
    }
    return best;
}

}  // namespace

SweepCurve sweep_grid(const std::vector<double>& grid,
                      const std::function<ObjectiveValue(double)>& eval_at, Direction dir,
                      int threads) {
    SweepCurve curve;
    curve.grid = grid;
    curve.direction = dir;
    const std::size_t n = grid.size();
    curve.values.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.fc.assign(n, std::numeric_limits<double>::quiet_NaN());
    curve.errors.assign(n, std::string());

    auto eval_point = [&](std::size_t i) {
        try {
            const ObjectiveValue v = eval_at(grid[i]);
            curve.values[i] = v.value_nats;
            curve.fc[i] = v.fc;
        } catch (const std::exception& e) {
            curve.errors[i] = e.what();
        }
    };

    threads = std::max(1, threads);
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) eval_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const auto workers = static_cast<std::size_t>(std::min<long>(threads, static_cast<long>(n)));
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) eval_point(i);
            });
        }
        for (auto& th : pool) th.join();
    }

    curve.argopt = resolve_argopt(curve);
    return curve;
}

SweepCurve run_sweep(const SweepSpec& spec, const Dataset& data, double step, int threads) {
    spec.validate();
    auto eval_at = [&](double value) {
        CogParams candidate = spec.base;
        *cog_param_field(candidate, spec.param_name) = value;
        // a candidate capacity below the default initial store caps the store
        candidate.B0_init = std::min(candidate.B0_init, candidate.B_max);
        return evaluate_objective(spec.objective, data, candidate, step);
    };
    return sweep_grid(spec.grid, eval_at, spec.objective.direction(), threads);
}

void SpsaConfig::validate(long dims) const {
    if (!(a > 0.0) || !(c > 0.0)) throw ConfigError("SPSA gains a and c must be > 0");
    if (!(gamma_gain > 0.0) || !(gamma_gain < alpha_gain) || !(alpha_gain <= 1.0))
        throw ConfigError("SPSA gain exponents must satisfy 0 < gamma < alpha <= 1");
    if (iterations < 0) throw ConfigError("SPSA iterations must be >= 0");
    if (penalty_weight < 0.0) throw ConfigError("penalty_weight must be >= 0");
    if (!bounds.empty() && static_cast<long>(bounds.size()) != dims)
        throw ConfigError("bounds dimension does not match x0");
    for (const auto& b : bounds) {
        if (!(b[0] < b[1])) throw ConfigError("each bound must satisfy lo < hi");
    }
}

namespace detail {

Eigen::VectorXd rademacher(std::mt19937_64& rng, long dims) {
    Eigen::VectorXd delta(dims);
    for (long i = 0; i < dims; ++i) delta(i) = (rng() & 1ull) ? 1.0 : -1.0;
    return delta;
}

}  // namespace detail

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const std::vector<std::array<double, 2>>& bounds) {
    if (bounds.empty()) return x;
    for (long i = 0; i < x.size(); ++i) {
        const auto& b = bounds[static_cast<std::size_t>(i)];
        x(i) = std::clamp(x(i), b[0], b[1]);
    }
    return x;
}

// Quadratic penalty on constraint violation; non-finite fc (empty-class
// sentinel) is treated as a capped violation so the iteration stays finite.
double penalized(const ProbeEval& e, double weight) {
    double violation = e.fc >= 0.0 ? 0.0 : -e.fc;
    if (!std::isfinite(violation)) violation = 1e6;
    return e.loss + weight * violation * violation;
}

struct BestTracker {
    Eigen::VectorXd x;
    double loss = std::numeric_limits<double>::infinity();
    double fc = -std::numeric_limits<double>::infinity();
    bool feasible = false;
    bool any = false;

    void offer(const Eigen::VectorXd& cand, const ProbeEval& e) {
        const bool cand_feasible = e.fc >= 0.0;
        bool better = false;
        if (!any) {
            better = true;
        } else if (feasible) {
            better = cand_feasible && e.loss < loss;
        } else {
            // no feasible point seen yet: prefer feasibility, then least violation
            better = cand_feasible || e.fc > fc;
        }
        if (better) {
            x = cand;
            loss = e.loss;
            fc = e.fc;
            feasible = cand_feasible;
            any = true;
        }
    }
};

}  // namespace

SpsaResult spsa_minimize(const SpsaEvaluator& evaluate, const Eigen::VectorXd& x0,
                         const SpsaConfig& cfg) {
    const long dims = x0.size();
    cfg.validate(dims);

    SpsaResult result;
    result.x_best = x0;
    if (cfg.iterations == 0) return result;

    const double stability = cfg.A_stab >= 0.0 ? cfg.A_stab : 0.1 * cfg.iterations;
    std::mt19937_64 rng(cfg.seed);
    Eigen::VectorXd x = project(x0, cfg.bounds);
    BestTracker best;

    result.history.reserve(static_cast<std::size_t>(cfg.iterations));
    for (int k = 0; k < cfg.iterations; ++k) {
        const double a_k = cfg.a / std::pow(stability + k + 1, cfg.alpha_gain);
        const double c_k = cfg.c / std::pow(k + 1, cfg.gamma_gain);
        const Eigen::VectorXd delta = detail::rademacher(rng, dims);

        const Eigen::VectorXd x_plus = project(x + c_k * delta, cfg.bounds);
        const Eigen::VectorXd x_minus = project(x - c_k * delta, cfg.bounds);
        const ProbeEval e_plus = evaluate(x_plus);
        const ProbeEval e_minus = evaluate(x_minus);
        result.n_evals += 2;

        SpsaHistoryRow row;
        row.iteration = k;
        row.x = x;
        row.objective = 0.5 * (e_plus.loss + e_minus.loss);
        row.fc = 0.5 * (e_plus.fc + e_minus.fc);
        row.feasible = row.fc >= 0.0;
        // the iterate itself is never evaluated; rank it by its probe means
        best.offer(x, ProbeEval{row.objective, row.fc});
        result.history.push_back(std::move(row));

        const double diff = penalized(e_plus, cfg.penalty_weight) -
                            penalized(e_minus, cfg.penalty_weight);
        const Eigen::VectorXd gradient = (diff / (2.0 * c_k)) * delta.cwiseInverse();
        x = project(x - a_k * gradient, cfg.bounds);
    }

    result.x_best = best.x;
    result.best_loss = best.loss;
    result.best_fc = best.fc;
    result.best_feasible = best.feasible;
    result.evaluated = best.any;
    return result;
}

}  // namespace infofit
