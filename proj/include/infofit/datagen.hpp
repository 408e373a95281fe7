#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "infofit/dynamics.hpp"

namespace infofit {

// Exponentially distributed phase durations; the off-phase after every
// break_every-th task draws from the slower break rate.
struct ScheduleGenConfig {
    int n_tasks = 300;
    double lambda_on = 0.25;          // 1/min
    double lambda_off = 0.25;         // 1/min
    double lambda_break = 1.0 / 40.0; // 1/min
    int break_every = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

// Logistic link from end-of-task resource to success probability.
struct OutcomeModel {
    double alpha = 169.0;
    double a_ref = 0.204;
};

double success_probability(double a_end, const OutcomeModel& m);

TaskSchedule sample_schedule(const ScheduleGenConfig& cfg, std::uint64_t seed);

std::vector<int> sample_outcomes(const std::vector<double>& a_end, const OutcomeModel& m,
                                 std::uint64_t seed);

// Places the sigmoid midpoint at the pool median and sets the steepness so
// the q_high quantile of the pool succeeds with probability p_high.
OutcomeModel calibrate_outcome_model(const std::vector<double>& a_end_pool, double p_high = 0.7,
                                     double q_high = 0.8);

struct SeriesData {
    TaskSchedule schedule;
    std::vector<double> t_end;
    std::vector<double> a_end_true;
    std::vector<int> outcomes;
    std::uint64_t schedule_seed = 0;
    std::uint64_t outcome_seed = 0;
};

struct Dataset {
    std::vector<SeriesData> series;
    CogParams gen_params;
    ScheduleGenConfig sched_cfg;
    OutcomeModel outcome_model;
    double step = 0.01;
    std::uint64_t master_seed = 0;
    bool calibrated = false;

    int total_tasks() const;
    double success_rate() const;
    std::vector<double> pooled_a_end_true() const;
    std::vector<int> pooled_outcomes() const;
};

// n_series independent series. Per-series seeds are derived from
// master_seed (streams 2*i for the schedule, 2*i+1 for outcomes). When
// fixed_model is empty the outcome model is calibrated once on the pooled
// true a_end of all series before any outcome is drawn.
Dataset generate_dataset(const CogParams& cog, const ScheduleGenConfig& sched_cfg, int n_series,
                         const std::optional<OutcomeModel>& fixed_model, std::uint64_t master_seed,
                         double step = 0.01, double calibrate_p_high = 0.7,
                         double calibrate_q_high = 0.8);

// Directory layout: manifest.json plus per-series series_NNN.csv
// (task_index, t_end, A_end_true, outcome) and series_NNN_phases.csv
// (phase_index, kind, duration).
void save_dataset(const Dataset& data, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

// Linear-interpolation quantile of a sample (q in [0, 1]).
double sample_quantile(std::vector<double> values, double q);

}  // namespace infofit
