#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "infofit/estimators.hpp"
#include "test_support.hpp"

using namespace infofit;
using namespace testsupport;

// Closed-form oracle values (nats)
namespace {
constexpr double kGaussEntropy = 1.4189385332046727;   // 0.5*ln(2*pi*e)
constexpr double kGaussMiRho09 = 0.8303656034108255;   // -0.5*ln(1-0.9^2)
constexpr double kKlShiftedGauss = 0.5;                // 0.5*(mu1-mu2)^2, sigma 1
constexpr double kKlScaledGauss = 0.3181471805599453;  // 0.5*(1/4 - 1 + ln 4)
constexpr double kLn2 = 0.6931471805599453;
}  // namespace

TEST_CASE("entropy of uniform samples is near zero") {
    auto s = to_set(uniform_vector(10000, 11));
    auto r = entropy_knn(s, {});
    CHECK(std::abs(r.value_nats) <= 0.05);
    CHECK(r.n == 10000);
    CHECK(r.k == 3);
}

TEST_CASE("entropy of standard Gaussian matches closed form") {
    auto s = to_set(gaussian_vector(10000, 0.0, 1.0, 12));
    auto r = entropy_knn(s, {});
    CHECK(std::abs(r.value_nats - kGaussEntropy) <= 0.05);
}

TEST_CASE("entropy units conversion") {
    auto s = to_set(gaussian_vector(2000, 0.0, 1.0, 13));
    auto r = entropy_knn(s, {});
    CHECK(r.value(Units::bits) == doctest::Approx(r.value_nats / kLn2));
}

TEST_CASE("entropy of coincident points yields degenerate sentinel") {
    Eigen::MatrixXd m(4, 1);
    m << 2.0, 2.0, 2.0, 2.0;
    auto r = entropy_knn(SampleSet(m), {});
    CHECK(std::isnan(r.value_nats));
    CHECK(r.has_flag(flag::degenerate_input));
}

TEST_CASE("entropy precondition n >= k + 1") {
    auto s = to_set({1.0, 2.0, 3.0});
    CHECK_THROWS_AS(entropy_knn(s, {}), TooFewSamples);
}

TEST_CASE("mi_ksg of independent uniforms is near zero") {
    auto x = to_set(uniform_vector(2000, 21));
    auto y = to_set(uniform_vector(2000, 22));
    auto r = mi_ksg(x, y, {});
    CHECK(std::abs(r.raw_nats) <= 0.05);
    CHECK(r.value_nats >= 0.0);
}

TEST_CASE("mi_ksg on correlated Gaussians matches closed form") {
    auto [x, y] = correlated_gaussian_pair(2000, 0.9, 23);
    auto r = mi_ksg(x, y, {});
    CHECK(std::abs(r.value_nats - kGaussMiRho09) <= 0.1);
}

TEST_CASE("mi_ksg is stable under monotone transformations") {
    auto [x, y] = correlated_gaussian_pair(2000, 0.9, 23);
    const double base = mi_ksg(x, y, {}).value_nats;
    auto fx = map_set(x, [](double v) { return std::exp(v); });
    auto gy = map_set(y, [](double v) { return v * v * v; });
    const double transformed = mi_ksg(fx, gy, {}).value_nats;
    CHECK(std::abs(base - transformed) <= 0.05);
}

TEST_CASE("mi_ksg drops under a non-invertible transformation") {
    auto [x, y] = correlated_gaussian_pair(2000, 0.9, 23);
    const double base = mi_ksg(x, y, {}).value_nats;
    auto folded = map_set(x, [](double v) { return std::cos(4.0 * std::numbers::pi * v); });
    const double degraded = mi_ksg(folded, y, {}).value_nats;
    CHECK(degraded < base - 0.1);
}

TEST_CASE("mi_ksg estimation error shrinks with sample size") {
    // median absolute error over 20 seeds, Gaussian oracle
    std::vector<long> sizes = {500, 2000, 8000};
    std::vector<double> median_err;
    for (long n : sizes) {
        std::vector<double> errs;
        for (std::uint64_t seed = 100; seed < 120; ++seed) {
            auto [x, y] = correlated_gaussian_pair(n, 0.9, seed);
            errs.push_back(std::abs(mi_ksg(x, y, {}).value_nats - kGaussMiRho09));
        }
        std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
        median_err.push_back(errs[10]);
    }
    CHECK(median_err[0] > median_err[1]);
    CHECK(median_err[1] > median_err[2]);
}

TEST_CASE("mi_ksg length and size preconditions") {
    auto x = to_set(uniform_vector(100, 1));
    auto y = to_set(uniform_vector(99, 2));
    CHECK_THROWS_AS(mi_ksg(x, y, {}), LengthMismatch);
    auto sx = to_set({1.0, 2.0});
    auto sy = to_set({3.0, 4.0});
    CHECK_THROWS_AS(mi_ksg(sx, sy, {}), TooFewSamples);
}

TEST_CASE("mi_ksg degenerate marginal reports exactly zero") {
    auto x = to_set(std::vector<double>(50, 1.0));
    auto y = to_set(uniform_vector(50, 3));
    auto r = mi_ksg(x, y, {});
    CHECK(r.value_nats == 0.0);
    CHECK(r.has_flag(flag::degenerate_input));
}

TEST_CASE("mi_lnc of independent uniforms is near zero") {
    auto x = to_set(uniform_vector(2000, 31));
    auto y = to_set(uniform_vector(2000, 32));
    auto r = mi_lnc(x, y, {});
    CHECK(std::abs(r.value_nats) <= 0.05);
}

TEST_CASE("mi_lnc boosts near-deterministic relationships") {
    auto x = to_set(uniform_vector(2000, 33));
    auto y = x;  // exact equality before jitter
    auto lnc = mi_lnc(x, y, {});
    auto ksg = mi_ksg(x, y, {});
    CHECK(lnc.value_nats >= ksg.value_nats);
    CHECK(ksg.value_nats > 2.0);
    CHECK(lnc.value_nats > 4.0);
}

TEST_CASE("mi_lnc peaks at the true decay rate, sharper than mi_ksg") {
    // near-deterministic three-layer fixture: z = 3 * (exp(-2 t) + noise)
    const double lambda_true = 2.0;
    std::vector<double> t(1000), z(1000);
    Gauss noise(7);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = 3.0 * static_cast<double>(i) / 999.0;
        z[i] = 3.0 * (std::exp(-lambda_true * t[i]) + 1e-8 * noise());
    }
    const SampleSet zs = to_set(z);

    auto curve = [&](bool lnc) {
        std::vector<double> values;
        for (double lh : {1.7, 2.0, 2.3}) {
            std::vector<double> yhat(t.size());
            for (std::size_t i = 0; i < t.size(); ++i) yhat[i] = std::exp(-lh * t[i]);
            auto s = to_set(yhat);
            values.push_back((lnc ? mi_lnc(s, zs, {}) : mi_ksg(s, zs, {})).value_nats);
        }
        return values;
    };
    const auto lnc = curve(true);
    const auto ksg = curve(false);

    CHECK(lnc[1] > lnc[0]);
    CHECK(lnc[1] > lnc[2]);
    const double lnc_prominence = lnc[1] - std::max(lnc[0], lnc[2]);
    const double ksg_prominence = ksg[1] - std::max(ksg[0], ksg[2]);
    CHECK(lnc_prominence > ksg_prominence);
}

TEST_CASE("mi_lnc falls back to KSG when k is too small for local PCA") {
    auto x = to_set(uniform_vector(500, 34));
    auto y = to_set(uniform_vector(500, 35));
    EstimatorConfig cfg;
    cfg.k = 2;  // joint dimension 2 requires k >= 3
    auto r = mi_lnc(x, y, cfg);
    CHECK(r.has_flag(flag::lnc_fallback));
    auto k = mi_ksg(x, y, cfg);
    CHECK(r.value_nats == k.value_nats);
}

TEST_CASE("mi_mixed of label-independent values is near zero") {
    auto values = gaussian_vector(2000, 0.0, 1.0, 41);
    std::mt19937_64 rng(42);
    LabeledSampleSet s;
    s.values = Eigen::Map<Eigen::MatrixXd>(values.data(), 2000, 1);
    s.labels.resize(2000);
    for (auto& l : s.labels) l = uniform01(rng) < 0.5 ? 1 : 0;
    auto r = mi_mixed(s, {});
    CHECK(std::abs(r.value_nats) <= 0.05);
}

TEST_CASE("mi_mixed of a median-threshold label matches ln 2") {
    auto values = uniform_vector(4000, 43);
    std::vector<double> sorted = values;
    std::nth_element(sorted.begin(), sorted.begin() + 2000, sorted.end());
    const double median = sorted[2000];
    LabeledSampleSet s;
    s.values = Eigen::Map<Eigen::MatrixXd>(values.data(), 4000, 1);
    s.labels.resize(4000);
    for (std::size_t i = 0; i < values.size(); ++i) s.labels[i] = values[i] > median ? 1 : 0;
    auto r = mi_mixed(s, {});
    CHECK(std::abs(r.value_nats - kLn2) <= 0.07);
}

TEST_CASE("mi_mixed with a single label class is exactly zero") {
    LabeledSampleSet s;
    s.values = Eigen::Map<Eigen::MatrixXd>(uniform_vector(100, 44).data(), 100, 1);
    s.labels.assign(100, 7);
    auto r = mi_mixed(s, {});
    CHECK(r.value_nats == 0.0);
    CHECK(r.has_flag(flag::single_class));
}

TEST_CASE("mi_mixed drops classes smaller than k + 1") {
    auto values = uniform_vector(500, 45);
    LabeledSampleSet s;
    s.values = Eigen::Map<Eigen::MatrixXd>(values.data(), 500, 1);
    s.labels.assign(500, 0);
    s.labels[0] = 1;
    s.labels[1] = 1;  // class of size 2 <= k = 3
    auto r = mi_mixed(s, {});
    CHECK(r.has_flag(flag::small_class_dropped));
    CHECK(std::isfinite(r.value_nats));
}

TEST_CASE("kl_knn of same-distribution samples is near zero") {
    auto p = to_set(gaussian_vector(2000, 0.0, 1.0, 51));
    auto q = to_set(gaussian_vector(2000, 0.0, 1.0, 52));
    auto r = kl_knn(p, q, {});
    CHECK(std::abs(r.value_nats) <= 0.1);
}

TEST_CASE("kl_knn of shifted Gaussians matches closed form") {
    auto p = to_set(gaussian_vector(4000, 0.0, 1.0, 53));
    auto q = to_set(gaussian_vector(4000, 1.0, 1.0, 54));
    auto r = kl_knn(p, q, {});
    CHECK(std::abs(r.value_nats - kKlShiftedGauss) <= 0.1);
}

TEST_CASE("kl_knn of scale-mismatched Gaussians matches closed form") {
    auto p = to_set(gaussian_vector(4000, 0.0, 1.0, 55));
    auto q = to_set(gaussian_vector(4000, 0.0, 2.0, 56));
    auto r = kl_knn(p, q, {});
    CHECK(std::abs(r.value_nats - kKlScaledGauss) <= 0.1);
}

TEST_CASE("kl_knn approximate non-negativity on analytic fixtures") {
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        auto p = to_set(gaussian_vector(2000, 0.0, 1.0, seed));
        auto q = to_set(gaussian_vector(2000, 0.5, 1.2, seed + 100));
        CHECK(kl_knn(p, q, {}).value_nats >= -0.1);
    }
}

TEST_CASE("kl_knn of a set against itself is near zero") {
    auto p = to_set(gaussian_vector(1500, 0.0, 1.0, 57));
    auto r = kl_knn(p, p, {});
    // exact-twin rows are excluded from the nu search, leaving ln(m/(n-1))
    CHECK(std::abs(r.value_nats) <= 0.02);
}

TEST_CASE("kl_knn dimension and size preconditions") {
    auto p = to_set(uniform_vector(100, 61));
    Eigen::MatrixXd two(100, 2);
    two.setRandom();
    CHECK_THROWS_AS(kl_knn(p, SampleSet(two), {}), DimensionMismatch);
    CHECK_THROWS_AS(kl_knn(to_set({1.0, 2.0}), p, {}), TooFewSamples);
}

TEST_CASE("kl_to_gaussian of matched samples is near zero") {
    auto p = to_set(gaussian_vector(4000, 0.7, 0.3, 62));
    auto r = kl_to_gaussian(p, 0.7, 0.3, {});
    CHECK(std::abs(r.value_nats) <= 0.05);
}

TEST_CASE("kl_to_gaussian against a shifted reference matches closed form") {
    auto p = to_set(gaussian_vector(4000, 0.0, 1.0, 63));
    auto r = kl_to_gaussian(p, 1.0, 1.0, {});
    CHECK(std::abs(r.value_nats - kKlShiftedGauss) <= 0.07);
}

TEST_CASE("kl_to_gaussian agrees with kl_knn on matched fixtures") {
    auto p = to_set(gaussian_vector(4000, 0.2, 0.8, 64));
    auto q = to_set(gaussian_vector(4000, 0.5, 1.0, 65));
    const double parametric = kl_to_gaussian(p, 0.5, 1.0, {}).value_nats;
    const double sampled = kl_knn(p, q, {}).value_nats;
    CHECK(std::abs(parametric - sampled) <= 0.1);
}

TEST_CASE("kl_to_gaussian rejects non-positive sigma") {
    auto p = to_set(uniform_vector(100, 66));
    CHECK_THROWS_AS(kl_to_gaussian(p, 0.0, 0.0, {}), NonPositiveSigma);
}

TEST_CASE("identical inputs and seed give bit-identical estimates") {
    auto [x, y] = correlated_gaussian_pair(800, 0.7, 71);
    EstimatorConfig cfg;
    cfg.seed = 99;
    CHECK(mi_ksg(x, y, cfg).value_nats == mi_ksg(x, y, cfg).value_nats);
    CHECK(mi_lnc(x, y, cfg).value_nats == mi_lnc(x, y, cfg).value_nats);
    CHECK(entropy_knn(x, cfg).value_nats == entropy_knn(x, cfg).value_nats);
    CHECK(kl_knn(x, y, cfg).value_nats == kl_knn(x, y, cfg).value_nats);
}

TEST_CASE("estimates are invariant under sample permutation") {
    auto [x, y] = correlated_gaussian_pair(800, 0.7, 72);
    EstimatorConfig pre;
    pre.seed = 5;
    auto jx = apply_jitter(x, pre.jitter_scale, 1001);
    auto jy = apply_jitter(y, pre.jitter_scale, 1002);

    EstimatorConfig nojit;
    nojit.jitter_scale = 0.0;
    const double base = mi_ksg(jx, jy, nojit).value_nats;

    std::vector<long> perm(800);
    std::iota(perm.begin(), perm.end(), 0L);
    std::mt19937_64 rng(7);
    std::shuffle(perm.begin(), perm.end(), rng);
    SampleSet px = jx, py = jy;
    for (long i = 0; i < 800; ++i) {
        px.points.row(i) = jx.points.row(perm[static_cast<std::size_t>(i)]);
        py.points.row(i) = jy.points.row(perm[static_cast<std::size_t>(i)]);
    }
    const double shuffled = mi_ksg(px, py, nojit).value_nats;
    CHECK(shuffled == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("jitter itself is permutation-invariant as a multiset") {
    auto x = to_set(uniform_vector(200, 73));
    x.points(5, 0) = x.points(17, 0);  // inject an exact duplicate
    auto jittered = apply_jitter(x, 1e-10, 42);

    SampleSet reversed = x;
    for (long i = 0; i < 200; ++i) reversed.points.row(i) = x.points.row(199 - i);
    auto jittered_rev = apply_jitter(reversed, 1e-10, 42);

    std::vector<double> a(jittered.points.data(), jittered.points.data() + 200);
    std::vector<double> b(jittered_rev.points.data(), jittered_rev.points.data() + 200);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
}

TEST_CASE("estimator result serializes to the wire schema") {
    auto s = to_set(uniform_vector(50, 74));
    auto r = entropy_knn(s, {});
    const std::string j = to_json(r);
    CHECK(j.find("\"value_nats\":") != std::string::npos);
    CHECK(j.find("\"k\":3") != std::string::npos);
    CHECK(j.find("\"n\":50") != std::string::npos);
    CHECK(j.find("\"flags\":[") != std::string::npos);
}

TEST_CASE("estimator config validation") {
    auto s = to_set(uniform_vector(50, 75));
    EstimatorConfig bad_k;
    bad_k.k = 0;
    CHECK_THROWS_AS(entropy_knn(s, bad_k), ConfigError);
    EstimatorConfig bad_alpha;
    bad_alpha.lnc_alpha = 1.5;
    CHECK_THROWS_AS(entropy_knn(s, bad_alpha), ConfigError);
    EstimatorConfig bad_jitter;
    bad_jitter.jitter_scale = 1e-6;
    CHECK_THROWS_AS(entropy_knn(s, bad_jitter), ConfigError);
}
