#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "infofit/samples.hpp"

namespace infofit {

enum class Units { nats, bits };

struct EstimatorConfig {
    int k = 3;                    // neighbor count
    double lnc_alpha = 0.05;      // LNC volume-ratio threshold, (0, 1]; see mi_lnc
    double jitter_scale = 1e-10;  // relative to per-coordinate range; 0 = caller pre-jittered
    std::uint64_t seed = 0;       // jitter seed
    Units units = Units::nats;
};

namespace flag {
inline constexpr const char* degenerate_input = "degenerate_input";
inline constexpr const char* clamped = "clamped";
inline constexpr const char* single_class = "single_class";
inline constexpr const char* small_class_dropped = "small_class_dropped";
inline constexpr const char* lnc_fallback = "lnc_fallback";
inline constexpr const char* lnc_degenerate_neighborhood = "lnc_degenerate_neighborhood";
}  // namespace flag

struct EstimatorResult {
    double value_nats = 0.0;  // reported value, clamping rules applied
    double raw_nats = 0.0;    // value before clamping
    int k = 0;
    long n = 0;
    std::vector<std::string> flags;

    bool has_flag(std::string_view f) const;
    // value_nats converted to the requested units
    double value(Units u) const;
};

// {"value_nats": .., "k": .., "n": .., "flags": [..]}
std::string to_json(const EstimatorResult& r);

// Kozachenko-Leonenko differential entropy, Chebyshev metric, nats.
// All points coinciding before jitter yields a NaN sentinel with the
// degenerate_input flag rather than an exception.
EstimatorResult entropy_knn(const SampleSet& s, const EstimatorConfig& cfg);

// Kraskov-style mutual information (joint k-th neighbor distance, marginal
// neighbor counts, digamma combination). Reported value is clamped below at
// zero; raw_nats keeps the unclamped estimate. Either marginal degenerate
// (all points identical before jitter) yields exactly 0.
EstimatorResult mi_ksg(const SampleSet& x, const SampleSet& y, const EstimatorConfig& cfg);

// mi_ksg plus the local non-uniformity correction: per point, the volume of
// the PCA-aligned bounding box of its joint-space k-neighborhood is compared
// against the axis-aligned bounding box of the same neighborhood, and the
// mean log-ratio over points where the ratio falls below lnc_alpha is
// subtracted. Falls back to mi_ksg (with lnc_fallback flag) when
// k < joint dimension + 1.
EstimatorResult mi_lnc(const SampleSet& x, const SampleSet& y, const EstimatorConfig& cfg);

// Mixed discrete-continuous MI via the entropy difference
// H(values) - sum_c p(c) H(values | label = c). Label classes of size <= k
// contribute zero conditional-entropy weight and raise a flag. A single
// label class yields exactly 0.
EstimatorResult mi_mixed(const LabeledSampleSet& s, const EstimatorConfig& cfg);

// Nearest-neighbor KL divergence D(P||Q):
//   (d/n) sum_i ln(nu_k(i) / rho_k(i)) + ln(m / (n-1)),
// rho_k the k-th neighbor distance within p (self excluded), nu_k the k-th
// neighbor distance into q, skipping q rows bit-identical to p_i (a literal
// copy of the query point is not an independent sample; with it, D(P||P)
// would sit near -1/k instead of 0). May be negative at small samples; not
// symmetric.
EstimatorResult kl_knn(const SampleSet& p, const SampleSet& q, const EstimatorConfig& cfg);

// D(P || N(mu, sigma^2)) for 1-d samples: -H(P) - <ln phi(p_i)> with H via
// entropy_knn and the exact Gaussian log-density for the cross term.
EstimatorResult kl_to_gaussian(const SampleSet& p, double mu, double sigma,
                               const EstimatorConfig& cfg);

}  // namespace infofit
