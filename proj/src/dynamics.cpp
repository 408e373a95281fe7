#include "infofit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "infofit/common.hpp"
#include "infofit/io.hpp"

namespace infofit {

ToyForm toy_form_from_string(const std::string& s) {
    if (s == "linear") return ToyForm::linear;
    if (s == "exponential") return ToyForm::exponential;
    if (s == "sinusoidal") return ToyForm::sinusoidal;
    throw ConfigError("unknown toy form: " + s);
}

std::string to_string(ToyForm f) {
    switch (f) {
        case ToyForm::linear: return "linear";
        case ToyForm::exponential: return "exponential";
        case ToyForm::sinusoidal: return "sinusoidal";
    }
    return "linear";
}

void ToyConfig::validate() const {
    if (t_grid.size() < 2) throw ConfigError("toy t_grid needs at least 2 samples");
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ConfigError("toy t_grid must be strictly increasing");
    }
    if (noise_std < 0.0) throw ConfigError("toy noise_std must be >= 0");
}

namespace {

// Box-Muller from portable uniforms; one normal per call, cached pair.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(rng_);
        while (u1 <= 0.0) u1 = uniform01(rng_);
        const double u2 = uniform01(rng_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

double apply_form(ToyForm form, double a, double y) {
    switch (form) {
        case ToyForm::linear: return a * y;
        case ToyForm::exponential: return std::exp(a * y);
        case ToyForm::sinusoidal: return std::sin(a * y);
    }
    return a * y;
}

}  // namespace

ToySeries toy_generate(const ToyConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.t_grid.size();
    ToySeries out;
    out.x.resize(n);
    out.y.resize(n);
    out.z.resize(n);

    NormalSampler noise(derive_seed(cfg.seed, 0));
    for (std::size_t i = 0; i < n; ++i) {
        out.x[i] = std::exp(-cfg.lambda_true * cfg.t_grid[i]);
        out.y[i] = out.x[i] + (cfg.noise_std > 0.0 ? cfg.noise_std * noise() : 0.0);
        out.z[i] = apply_form(cfg.form, cfg.a, out.y[i]);
    }
    return out;
}

std::vector<double> toy_candidate(double lambda_hat, const std::vector<double>& t_grid) {
    std::vector<double> out(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) out[i] = std::exp(-lambda_hat * t_grid[i]);
    return out;
}

void CogParams::validate() const {
    if (k_w < 0.0 || k_r < 0.0 || k_b < 0.0)
        throw ConfigError("rate coefficients must be >= 0");
    if (K_A <= 0.0 || K_B <= 0.0) throw ConfigError("half-saturation constants must be > 0");
    if (B_max <= 0.0) throw ConfigError("B_max must be > 0");
    if (rho < 0.0 || rho >= 1.0) throw ConfigError("rho must lie in [0, 1)");
    if (t_start <= 0.0) throw SingularTime("t_start must be > 0");
    if (A0_init < 0.0 || A0_init > 1.0) throw ConfigError("A0_init must lie in [0, 1]");
    if (B0_init < 0.0 || B0_init > B_max) throw ConfigError("B0_init must lie in [0, B_max]");
}

void TaskSchedule::validate() const {
    if (phases.empty()) throw ConfigError("schedule must contain at least one phase");
    for (std::size_t i = 0; i < phases.size(); ++i) {
        if (!(phases[i].duration > 0.0)) throw ConfigError("phase durations must be > 0");
        const PhaseKind expected = (i % 2 == 0) ? PhaseKind::on : PhaseKind::off;
        if (phases[i].kind != expected)
            throw ConfigError("phases must alternate on/off starting with on");
    }
}

int TaskSchedule::task_count() const {
    int c = 0;
    for (const auto& ph : phases) {
        if (ph.kind == PhaseKind::on) ++c;
    }
    return c;
}

double TaskSchedule::total_duration() const {
    double d = 0.0;
    for (const auto& ph : phases) d += ph.duration;
    return d;
}

Derivatives cog_rhs(double A, double B, double t, bool on_task, const CogParams& p) {
    if (t <= 0.0) throw SingularTime("cog_rhs requires t > 0");
    const double slow = 1.0 / std::pow(t, p.rho);
    const double w = on_task ? p.k_b * slow * ((1.0 - A) * B / (p.K_B + B)) : 0.0;
    Derivatives d;
    d.dA = w - p.k_w * slow * A / (p.K_A + A);
    d.dB = -w + (on_task ? 0.0 : p.k_r * slow * (p.B_max - B));
    return d;
}

Trajectory integrate_schedule(const CogParams& p, const TaskSchedule& sched, double step,
                              int trace_stride) {
    p.validate();
    sched.validate();
    if (!(step > 0.0)) throw ConfigError("integration step must be > 0");

    Trajectory traj;
    traj.a_end.reserve(static_cast<std::size_t>(sched.task_count()));
    traj.t_end.reserve(static_cast<std::size_t>(sched.task_count()));

    double A = p.A0_init;
    double B = p.B0_init;
    double t = p.t_start;

    auto record = [&](double tm, double a, double b) {
        traj.times.push_back(tm);
        traj.A.push_back(a);
        traj.B.push_back(b);
    };
    if (trace_stride > 0) record(t, A, B);

    double boundary = p.t_start;
    long step_index = 0;
    for (std::size_t phase_idx = 0; phase_idx < sched.phases.size(); ++phase_idx) {
        const Phase& ph = sched.phases[phase_idx];
        const bool on = ph.kind == PhaseKind::on;
        const double phase_start = boundary;
        boundary += ph.duration;

        const long n_steps = std::max<long>(1, static_cast<long>(std::ceil(ph.duration / step - 1e-12)));
        for (long s = 0; s < n_steps; ++s) {
            // last step lands exactly on the phase boundary
            const double t_next = (s == n_steps - 1) ? boundary : phase_start + static_cast<double>(s + 1) * step;
            const double h = t_next - t;

            const Derivatives k1 = cog_rhs(A, B, t, on, p);
            const Derivatives k2 = cog_rhs(A + 0.5 * h * k1.dA, B + 0.5 * h * k1.dB, t + 0.5 * h, on, p);
            const Derivatives k3 = cog_rhs(A + 0.5 * h * k2.dA, B + 0.5 * h * k2.dB, t + 0.5 * h, on, p);
            const Derivatives k4 = cog_rhs(A + h * k3.dA, B + h * k3.dB, t + h, on, p);

            A += h / 6.0 * (k1.dA + 2.0 * k2.dA + 2.0 * k3.dA + k4.dA);
            B += h / 6.0 * (k1.dB + 2.0 * k2.dB + 2.0 * k3.dB + k4.dB);
            t = t_next;

            if (!std::isfinite(A) || !std::isfinite(B))
                throw NonFiniteState("state diverged in phase " + std::to_string(phase_idx));

            const double a_clamped = std::clamp(A, 0.0, 1.0);
            const double b_clamped = std::clamp(B, 0.0, p.B_max);
            if (a_clamped != A || b_clamped != B) ++traj.clamp_events;
            A = a_clamped;
            B = b_clamped;

            ++step_index;
            if (trace_stride > 0 && (step_index % trace_stride == 0 || s == n_steps - 1))
                record(t, A, B);
        }

        if (on) {
            traj.a_end.push_back(A);
            traj.t_end.push_back(t);
        }
    }
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"time", "A", "B"});
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        csv.row(traj.times[i], traj.A[i], traj.B[i]);
}

void write_a_end_csv(const Trajectory& traj, const std::string& path) {
    CsvWriter csv(path);
    csv.header({"task_index", "t_end", "A_end"});
    for (std::size_t i = 0; i < traj.a_end.size(); ++i)
        csv.row(static_cast<long>(i), traj.t_end[i], traj.a_end[i]);
}

}  // namespace infofit
