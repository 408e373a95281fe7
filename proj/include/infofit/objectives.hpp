#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infofit/datagen.hpp"
#include "infofit/estimators.hpp"

namespace infofit {

enum class ObjectiveKind { mi, kl_prior, kl_disjoint };

enum class Direction { maximize, minimize };

Direction direction_of(ObjectiveKind kind);
ObjectiveKind objective_kind_from_string(const std::string& s);
std::string to_string(ObjectiveKind k);

// Per-outcome-class reference for the prior-divergence objective: either
// stored samples or a Gaussian (mu, sigma) per class.
struct ClassReference {
    std::vector<double> samples_incorrect;
    std::vector<double> samples_correct;
    std::optional<std::pair<double, double>> gauss_incorrect;  // (mu, sigma)
    std::optional<std::pair<double, double>> gauss_correct;

    bool parametric() const { return gauss_incorrect.has_value() && gauss_correct.has_value(); }
};

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::mi;
    EstimatorConfig estimator;
    bool pool_series = true;  // pool (a_end, outcome) across series; else average per series
    std::optional<ClassReference> reference;  // required for kl_prior

    Direction direction() const { return direction_of(kind); }
    void validate() const;
};

struct ObjectiveValue {
    ObjectiveKind kind = ObjectiveKind::mi;
    double value_nats = 0.0;
    double fc = 0.0;
    long n_correct = 0;
    long n_incorrect = 0;
    std::vector<std::string> flags;

    bool has_flag(std::string_view f) const;
};

// {"kind": .., "value_nats": .., "fc": .., "n_correct": .., "n_incorrect": .., "flags": [..]}
std::string to_json(const ObjectiveValue& v);

namespace objflag {
inline constexpr const char* empty_class = "empty_class";
}

// Mixed MI between end-of-task resources and binary outcomes, nats.
double objective_mi(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                    const EstimatorConfig& cfg, std::vector<std::string>* flags = nullptr);

// D(fitted|correct || ref|correct) + D(fitted|incorrect || ref|incorrect);
// minimized. An empty class yields +infinity (worst case for a loss).
double objective_kl_prior(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                          const ClassReference& reference, const EstimatorConfig& cfg,
                          std::vector<std::string>* flags = nullptr);

// D(A|correct || A|incorrect) + D(A|incorrect || A|correct); maximized.
// An empty class yields 0 (no separation measurable).
double objective_kl_disjoint(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                             const EstimatorConfig& cfg, std::vector<std::string>* flags = nullptr);

// <A|correct> - <A|incorrect>; feasible when >= 0. An empty class yields
// -infinity with the empty_class flag.
double constraint_fc(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                     std::vector<std::string>* flags = nullptr);

// Re-integrates every series schedule under the candidate parameters and
// evaluates the configured objective plus the ordering constraint.
ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const Dataset& data,
                                  const CogParams& candidate, double step);

// References built from the dataset's stored true resources.
ClassReference reference_from_dataset(const Dataset& data);
ClassReference gaussian_reference_from_dataset(const Dataset& data);

}  // namespace infofit
