#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace infofit {

enum class ToyForm { linear, exponential, sinusoidal };

ToyForm toy_form_from_string(const std::string& s);
std::string to_string(ToyForm f);

// Three-layer toy family: x decays exponentially, y adds Gaussian noise,
// z transforms y through one of three forms.
struct ToyConfig {
    double lambda_true = 2.0;
    double a = 3.0;
    ToyForm form = ToyForm::linear;
    std::vector<double> t_grid;
    double noise_std = 1e-8;  // near-deterministic, the regime the sweep resolves best
    std::uint64_t seed = 0;

    void validate() const;
};

struct ToySeries {
    std::vector<double> x, y, z;
};

ToySeries toy_generate(const ToyConfig& cfg);

// Candidate hidden series exp(-lambda_hat * t) evaluated on the grid.
std::vector<double> toy_candidate(double lambda_hat, const std::vector<double>& t_grid);

// Two-resource depletion model. The primary resource A is consumed while
// working and replenished by conversion of the secondary resource B, which
// itself recovers during rest. All rates carry a 1/t^rho slowdown, so the
// process must start at t > 0.
struct CogParams {
    double k_w = 0.2;   // consumption rate coefficient
    double k_r = 0.3;   // recovery rate coefficient
    double k_b = 0.4;   // conversion rate coefficient
    double K_A = 0.1;   // consumption half-saturation
    double K_B = 0.5;   // conversion half-saturation
    double B_max = 1.0; // secondary resource capacity
    double rho = 0.5;   // time-scaling exponent
    double A0_init = 0.3;
    double B0_init = 0.4;
    double t_start = 1.0;

    void validate() const;
};

enum class PhaseKind { on, off };

struct Phase {
    PhaseKind kind;
    double duration;  // minutes
};

// Alternating on/off phases, starting with an on-phase at t_start.
struct TaskSchedule {
    std::vector<Phase> phases;

    void validate() const;
    int task_count() const;
    double total_duration() const;
};

struct Derivatives {
    double dA;
    double dB;
};

// Right-hand side of the resource dynamics at time t. The consumption term
// applies on and off task; conversion runs only on task, recovery only off.
Derivatives cog_rhs(double A, double B, double t, bool on_task, const CogParams& p);

struct Trajectory {
    std::vector<double> times;  // sampled trace (empty when trace_stride == 0)
    std::vector<double> A;
    std::vector<double> B;
    std::vector<double> a_end;  // A at the end of each on-phase
    std::vector<double> t_end;  // time at the end of each on-phase
    long clamp_events = 0;      // steps where the state had to be clamped into bounds
};

// Fixed-step RK4, restarted at every phase boundary (the final step of each
// phase is shortened to land exactly on it). State is clamped to A in [0,1]
// and B in [0,B_max] after each step. trace_stride n records every n-th
// step into times/A/B; 0 disables the trace.
Trajectory integrate_schedule(const CogParams& p, const TaskSchedule& sched, double step,
                              int trace_stride = 1);

// CSV interfaces: the sampled trace as time,A,B and the per-task ends as
// task_index,t_end,A_end.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_a_end_csv(const Trajectory& traj, const std::string& path);

}  // namespace infofit
