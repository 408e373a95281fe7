#include "infofit/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "infofit/common.hpp"
#include "infofit/io.hpp"

namespace infofit {

using nlohmann::json;

void ScheduleGenConfig::validate() const {
    if (n_tasks < 1) throw ConfigError("n_tasks must be >= 1");
    if (lambda_on <= 0.0 || lambda_off <= 0.0 || lambda_break <= 0.0)
        throw ConfigError("schedule rates must be > 0");
    if (break_every < 1) throw ConfigError("break_every must be >= 1");
}

double success_probability(double a_end, const OutcomeModel& m) {
    return 1.0 / (1.0 + std::exp(-m.alpha * (a_end - m.a_ref)));
}

TaskSchedule sample_schedule(const ScheduleGenConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    std::mt19937_64 rng(seed);
    TaskSchedule sched;
    sched.phases.reserve(static_cast<std::size_t>(2 * cfg.n_tasks));
    for (int task = 1; task <= cfg.n_tasks; ++task) {
        sched.phases.push_back({PhaseKind::on, exp_sample(rng, cfg.lambda_on)});
        const bool long_break = task % cfg.break_every == 0;
        const double rate = long_break ? cfg.lambda_break : cfg.lambda_off;
        sched.phases.push_back({PhaseKind::off, exp_sample(rng, rate)});
    }
    return sched;
}

std::vector<int> sample_outcomes(const std::vector<double>& a_end, const OutcomeModel& m,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> out(a_end.size());
    for (std::size_t i = 0; i < a_end.size(); ++i) {
        if (!std::isfinite(a_end[i])) throw ConfigError("a_end must be finite");
        out[i] = uniform01(rng) < success_probability(a_end[i], m) ? 1 : 0;
    }
    return out;
}

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ConfigError("quantile of an empty sample");
    q = std::clamp(q, 0.0, 1.0);
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - std::floor(pos);
    return values[lo] + frac * (values[hi] - values[lo]);
}

OutcomeModel calibrate_outcome_model(const std::vector<double>& a_end_pool, double p_high,
                                     double q_high) {
    if (a_end_pool.size() < 2) throw DegeneratePool("calibration pool needs >= 2 values");
    if (p_high <= 0.5 || p_high >= 1.0) throw ConfigError("p_high must lie in (0.5, 1)");
    if (q_high <= 0.5 || q_high >= 1.0) throw ConfigError("q_high must lie in (0.5, 1)");

    const double median = sample_quantile(a_end_pool, 0.5);
    const double high = sample_quantile(a_end_pool, q_high);
    const double gap = high - median;
    if (gap <= 0.0) throw DegeneratePool("calibration pool has no quantile spread");

    OutcomeModel m;
    m.a_ref = median;
    m.alpha = std::log(p_high / (1.0 - p_high)) / gap;
    return m;
}

int Dataset::total_tasks() const {
    int c = 0;
    for (const auto& s : series) c += static_cast<int>(s.outcomes.size());
    return c;
}

double Dataset::success_rate() const {
    long correct = 0, total = 0;
    for (const auto& s : series) {
        for (int o : s.outcomes) {
            correct += o;
            ++total;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> Dataset::pooled_a_end_true() const {
    std::vector<double> out;
    for (const auto& s : series) out.insert(out.end(), s.a_end_true.begin(), s.a_end_true.end());
    return out;
}

std::vector<int> Dataset::pooled_outcomes() const {
    std::vector<int> out;
    for (const auto& s : series) out.insert(out.end(), s.outcomes.begin(), s.outcomes.end());
    return out;
}

Dataset generate_dataset(const CogParams& cog, const ScheduleGenConfig& sched_cfg, int n_series,
                         const std::optional<OutcomeModel>& fixed_model, std::uint64_t master_seed,
                         double step, double calibrate_p_high, double calibrate_q_high) {
    cog.validate();
    sched_cfg.validate();
    if (n_series < 1) throw ConfigError("n_series must be >= 1");

    Dataset data;
    data.gen_params = cog;
    data.sched_cfg = sched_cfg;
    data.step = step;
    data.master_seed = master_seed;
    data.series.resize(static_cast<std::size_t>(n_series));

    for (int i = 0; i < n_series; ++i) {
        SeriesData& s = data.series[static_cast<std::size_t>(i)];
        s.schedule_seed = derive_seed(master_seed, static_cast<std::uint64_t>(2 * i));
        s.outcome_seed = derive_seed(master_seed, static_cast<std::uint64_t>(2 * i + 1));
        s.schedule = sample_schedule(sched_cfg, s.schedule_seed);
        Trajectory traj = integrate_schedule(cog, s.schedule, step, /*trace_stride=*/0);
        s.t_end = std::move(traj.t_end);
        s.a_end_true = std::move(traj.a_end);
    }

    if (fixed_model) {
        data.outcome_model = *fixed_model;
        data.calibrated = false;
    } else {
        data.outcome_model =
            calibrate_outcome_model(data.pooled_a_end_true(), calibrate_p_high, calibrate_q_high);
        data.calibrated = true;
    }

    for (auto& s : data.series)
        s.outcomes = sample_outcomes(s.a_end_true, data.outcome_model, s.outcome_seed);
    return data;
}

namespace {

std::string series_file(int i) {
    std::ostringstream os;
    os << "series_" << (i < 100 ? (i < 10 ? "00" : "0") : "") << i << ".csv";
    return os.str();
}

std::string phases_file(int i) {
    std::string f = series_file(i);
    return f.substr(0, f.size() - 4) + "_phases.csv";
}

json cog_to_json(const CogParams& p) {
    return json{{"k_w", p.k_w},   {"k_r", p.k_r},     {"k_b", p.k_b},
                {"K_A", p.K_A},   {"K_B", p.K_B},     {"B_max", p.B_max},
                {"rho", p.rho},   {"A0_init", p.A0_init}, {"B0_init", p.B0_init},
                {"t_start", p.t_start}};
}

CogParams cog_from_json(const json& j) {
    CogParams p;
    p.k_w = j.at("k_w");
    p.k_r = j.at("k_r");
    p.k_b = j.at("k_b");
    p.K_A = j.at("K_A");
    p.K_B = j.at("K_B");
    p.B_max = j.at("B_max");
    p.rho = j.at("rho");
    p.A0_init = j.at("A0_init");
    p.B0_init = j.at("B0_init");
    p.t_start = j.at("t_start");
    return p;
}

}  // namespace

void save_dataset(const Dataset& data, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    json manifest;
    manifest["schema_version"] = 1;
    manifest["generator_version"] = kVersion;
    manifest["rng_scheme"] = kRngScheme;
    manifest["master_seed"] = data.master_seed;
    manifest["step"] = data.step;
    manifest["calibrated"] = data.calibrated;
    manifest["cog_params"] = cog_to_json(data.gen_params);
    manifest["schedule"] = json{{"n_tasks", data.sched_cfg.n_tasks},
                                {"lambda_on", data.sched_cfg.lambda_on},
                                {"lambda_off", data.sched_cfg.lambda_off},
                                {"lambda_break", data.sched_cfg.lambda_break},
                                {"break_every", data.sched_cfg.break_every},
                                {"seed", data.sched_cfg.seed}};
    manifest["outcome_model"] = json{{"alpha", data.outcome_model.alpha},
                                     {"a_ref", data.outcome_model.a_ref}};
    json series_list = json::array();
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const auto& s = data.series[i];
        series_list.push_back(json{{"file", series_file(static_cast<int>(i))},
                                   {"phases_file", phases_file(static_cast<int>(i))},
                                   {"schedule_seed", s.schedule_seed},
                                   {"outcome_seed", s.outcome_seed}});
    }
    manifest["series"] = series_list;

    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";

    for (std::size_t i = 0; i < data.series.size(); ++i) {
        const auto& s = data.series[i];
        CsvWriter csv(dir / series_file(static_cast<int>(i)));
        csv.header({"task_index", "t_end", "A_end_true", "outcome"});
        for (std::size_t t = 0; t < s.a_end_true.size(); ++t)
            csv.row(static_cast<long>(t), s.t_end[t], s.a_end_true[t], s.outcomes[t]);

        CsvWriter pcsv(dir / phases_file(static_cast<int>(i)));
        pcsv.header({"phase_index", "kind", "duration"});
        for (std::size_t ph = 0; ph < s.schedule.phases.size(); ++ph)
            pcsv.row(static_cast<long>(ph),
                     s.schedule.phases[ph].kind == PhaseKind::on ? "on" : "off",
                     s.schedule.phases[ph].duration);
    }
}

Dataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw ConfigError("missing manifest.json in " + dir.string());
    json manifest = json::parse(mf);
    if (manifest.at("schema_version").get<int>() != 1)
        throw ConfigError("unsupported dataset schema version");

    Dataset data;
    data.master_seed = manifest.at("master_seed");
    data.step = manifest.at("step");
    data.calibrated = manifest.at("calibrated");
    data.gen_params = cog_from_json(manifest.at("cog_params"));
    const json& sc = manifest.at("schedule");
    data.sched_cfg.n_tasks = sc.at("n_tasks");
    data.sched_cfg.lambda_on = sc.at("lambda_on");
    data.sched_cfg.lambda_off = sc.at("lambda_off");
    data.sched_cfg.lambda_break = sc.at("lambda_break");
    data.sched_cfg.break_every = sc.at("break_every");
    data.sched_cfg.seed = sc.at("seed");
    data.outcome_model.alpha = manifest.at("outcome_model").at("alpha");
    data.outcome_model.a_ref = manifest.at("outcome_model").at("a_ref");

    for (const json& entry : manifest.at("series")) {
        SeriesData s;
        s.schedule_seed = entry.at("schedule_seed");
        s.outcome_seed = entry.at("outcome_seed");

        CsvReader csv(dir / entry.at("file").get<std::string>());
        for (const auto& row : csv.rows()) {
            s.t_end.push_back(std::stod(row.at(1)));
            s.a_end_true.push_back(std::stod(row.at(2)));
            s.outcomes.push_back(std::stoi(row.at(3)));
        }

        CsvReader pcsv(dir / entry.at("phases_file").get<std::string>());
        for (const auto& row : pcsv.rows()) {
            Phase ph;
            ph.kind = row.at(1) == "on" ? PhaseKind::on : PhaseKind::off;
            ph.duration = std::stod(row.at(2));
            s.schedule.phases.push_back(ph);
        }
        s.schedule.validate();
        data.series.push_back(std::move(s));
    }
    return data;
}

}  // namespace infofit
