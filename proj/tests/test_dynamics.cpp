#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "infofit/common.hpp"
#include "infofit/datagen.hpp"
#include "infofit/dynamics.hpp"

using namespace infofit;

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Closed-form reference for the separable sub-case (k_b = 0, so conversion
// is off and A follows dA = -(k_w/t^rho) A/(K_A+A)):
//   K_A ln A + A = K_A ln A0 + A0 - k_w (t^(1-rho) - t0^(1-rho)) / (1-rho).
// Solved for A by bisection; independent of the RK4 path under test.
double separable_reference(const CogParams& p, double t) {
    const double rhs = p.K_A * std::log(p.A0_init) + p.A0_init -
                       p.k_w * (std::pow(t, 1.0 - p.rho) - std::pow(p.t_start, 1.0 - p.rho)) /
                           (1.0 - p.rho);
    double lo = 1e-300, hi = 1.0;
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double g = p.K_A * std::log(mid) + mid - rhs;
        if (g > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo <= 1e-17 * hi) break;
    }
    return 0.5 * (lo + hi);
}

TaskSchedule fixture_schedule() {
    ScheduleGenConfig cfg;
    cfg.n_tasks = 20;
    return sample_schedule(cfg, 4242);
}

}  // namespace

TEST_CASE("toy_generate with zero noise reproduces x exactly") {
    ToyConfig cfg;
    cfg.noise_std = 0.0;
    cfg.t_grid = linspace(0.0, 3.0, 100);
    auto s = toy_generate(cfg);
    CHECK(s.y == s.x);
}

TEST_CASE("toy_generate with lambda zero gives a constant series") {
    ToyConfig cfg;
    cfg.lambda_true = 0.0;
    cfg.noise_std = 0.0;
    cfg.t_grid = linspace(0.0, 3.0, 50);
    auto s = toy_generate(cfg);
    for (double v : s.x) CHECK(v == 1.0);
}

TEST_CASE("toy exponential form with a = 0 gives all ones") {
    ToyConfig cfg;
    cfg.form = ToyForm::exponential;
    cfg.a = 0.0;
    cfg.noise_std = 0.0;
    cfg.t_grid = linspace(0.0, 3.0, 50);
    auto s = toy_generate(cfg);
    for (double v : s.z) CHECK(v == 1.0);
}

TEST_CASE("toy_generate is deterministic in the seed") {
    ToyConfig cfg;
    cfg.noise_std = 0.05;
    cfg.seed = 77;
    cfg.t_grid = linspace(0.0, 3.0, 200);
    auto s1 = toy_generate(cfg);
    auto s2 = toy_generate(cfg);
    CHECK(s1.y == s2.y);
    cfg.seed = 78;
    auto s3 = toy_generate(cfg);
    CHECK(s1.y != s3.y);
}

TEST_CASE("toy_candidate evaluates the candidate series") {
    CHECK(toy_candidate(2.0, {0.5})[0] == doctest::Approx(0.36787944117144233).epsilon(1e-15));
    ToyConfig cfg;
    cfg.noise_std = 0.0;
    cfg.lambda_true = 1.3;
    cfg.t_grid = linspace(0.0, 2.0, 64);
    auto s = toy_generate(cfg);
    CHECK(toy_candidate(1.3, cfg.t_grid) == s.x);
    for (double v : toy_candidate(0.0, cfg.t_grid)) CHECK(v == 1.0);
}

TEST_CASE("cog_rhs off task only depletes the primary resource") {
    CogParams p;
    auto d = cog_rhs(0.5, 0.7, 2.0, false, p);
    const double slow = 1.0 / std::sqrt(2.0);
    CHECK(d.dA == doctest::Approx(-p.k_w * slow * 0.5 / (p.K_A + 0.5)).epsilon(1e-14));
    CHECK(d.dA <= 0.0);
    CHECK(d.dB >= 0.0);
}

TEST_CASE("cog_rhs conversion conserves A + B when k_w = k_r = 0") {
    CogParams p;
    p.k_w = 0.0;
    p.k_r = 0.0;
    auto d = cog_rhs(0.4, 0.6, 3.7, true, p);
    CHECK(d.dA + d.dB == 0.0);
    CHECK(d.dA > 0.0);
}

TEST_CASE("cog_rhs matches the hand-evaluated oracle") {
    CogParams p;
    p.k_b = 0.4;
    p.k_w = 0.2;
    p.K_A = 0.1;
    p.K_B = 0.1;
    p.rho = 0.5;
    auto d = cog_rhs(0.5, 0.5, 1.0, true, p);
    CHECK(d.dA == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(d.dB == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("cog_rhs rejects non-positive time") {
    CogParams p;
    CHECK_THROWS_AS(cog_rhs(0.5, 0.5, 0.0, true, p), SingularTime);
    CHECK_THROWS_AS(cog_rhs(0.5, 0.5, -1.0, false, p), SingularTime);
}

TEST_CASE("single on-phase schedule yields one a_end") {
    CogParams p;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 5.0}};
    auto traj = integrate_schedule(p, sched, 0.01);
    CHECK(traj.a_end.size() == 1);
    CHECK(traj.t_end[0] == doctest::Approx(p.t_start + 5.0).epsilon(1e-12));
}

TEST_CASE("schedule validation enforces alternation and positivity") {
    TaskSchedule sched;
    sched.phases = {{PhaseKind::off, 1.0}};
    CHECK_THROWS_AS(sched.validate(), ConfigError);
    sched.phases = {{PhaseKind::on, 1.0}, {PhaseKind::on, 1.0}};
    CHECK_THROWS_AS(sched.validate(), ConfigError);
    sched.phases = {{PhaseKind::on, 0.0}};
    CHECK_THROWS_AS(sched.validate(), ConfigError);
    sched.phases = {};
    CHECK_THROWS_AS(sched.validate(), ConfigError);
}

TEST_CASE("A + B is conserved when consumption and recovery are off") {
    CogParams p;
    p.k_w = 0.0;
    p.k_r = 0.0;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 50.0}, {PhaseKind::off, 50.0}};
    auto traj = integrate_schedule(p, sched, 0.01);
    const double total = p.A0_init + p.B0_init;
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i)
        worst = std::max(worst, std::abs(traj.A[i] + traj.B[i] - total));
    CHECK(worst <= 1e-8);
}

TEST_CASE("A is non-increasing when conversion and recovery are off") {
    CogParams p;
    p.k_b = 0.0;
    p.k_r = 0.0;
    auto traj = integrate_schedule(p, fixture_schedule(), 0.01);
    for (std::size_t i = 1; i < traj.A.size(); ++i) CHECK(traj.A[i] <= traj.A[i - 1]);
}

TEST_CASE("default dynamics never hit the state clamp") {
    CogParams p;
    auto traj = integrate_schedule(p, fixture_schedule(), 0.01);
    CHECK(traj.clamp_events == 0);
    for (double v : traj.A) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (double v : traj.B) {
        CHECK(v >= 0.0);
        CHECK(v <= p.B_max);
    }
}

TEST_CASE("halving the step barely moves a_end") {
    CogParams p;
    auto sched = fixture_schedule();
    auto coarse = integrate_schedule(p, sched, 0.01, 0);
    auto fine = integrate_schedule(p, sched, 0.005, 0);
    REQUIRE(coarse.a_end.size() == fine.a_end.size());
    for (std::size_t i = 0; i < coarse.a_end.size(); ++i)
        CHECK(std::abs(coarse.a_end[i] - fine.a_end[i]) <= 1e-7);
}

TEST_CASE("global error scales at fourth order on the separable sub-case") {
    CogParams p;
    p.k_b = 0.0;
    p.k_w = 1.0;
    p.A0_init = 0.9;
    p.t_start = 0.25;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 4.0}};

    const double reference = separable_reference(p, p.t_start + 4.0);
    std::vector<double> errors;
    for (double h : {0.04, 0.02, 0.01}) {
        auto traj = integrate_schedule(p, sched, h, 0);
        errors.push_back(std::abs(traj.a_end[0] - reference));
    }
    const double r1 = errors[0] / errors[1];
    const double r2 = errors[1] / errors[2];
    CHECK(r1 >= 4.0);
    CHECK(r1 <= 64.0);
    CHECK(r2 >= 4.0);
    CHECK(r2 <= 64.0);
}

TEST_CASE("phase boundaries are landed on exactly") {
    CogParams p;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 0.037}, {PhaseKind::off, 1.503}, {PhaseKind::on, 2.2}};
    auto traj = integrate_schedule(p, sched, 0.01);
    CHECK(traj.t_end.size() == 2);
    CHECK(traj.t_end[0] == doctest::Approx(p.t_start + 0.037).epsilon(1e-12));
    CHECK(traj.t_end[1] == doctest::Approx(p.t_start + 0.037 + 1.503 + 2.2).epsilon(1e-12));
    CHECK(traj.times.back() == doctest::Approx(p.t_start + sched.total_duration()).epsilon(1e-12));
}

TEST_CASE("diverging state reports the failing phase") {
    CogParams p;
    p.k_b = 1e200;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 1.0}};
    CHECK_THROWS_AS(integrate_schedule(p, sched, 0.01), NonFiniteState);
}

TEST_CASE("integration validates parameters and step") {
    CogParams p;
    p.t_start = 0.0;
    TaskSchedule sched;
    sched.phases = {{PhaseKind::on, 1.0}};
    CHECK_THROWS_AS(integrate_schedule(p, sched, 0.01), SingularTime);
    CogParams ok;
    CHECK_THROWS_AS(integrate_schedule(ok, sched, 0.0), ConfigError);
    CogParams bad_rho;
    bad_rho.rho = 1.0;
    CHECK_THROWS_AS(integrate_schedule(bad_rho, sched, 0.01), ConfigError);
}
