#include "infofit/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "infofit/common.hpp"

namespace infofit {

Direction direction_of(ObjectiveKind kind) {
    return kind == ObjectiveKind::kl_prior ? Direction::minimize : Direction::maximize;
}

ObjectiveKind objective_kind_from_string(const std::string& s) {
    if (s == "mi") return ObjectiveKind::mi;
    if (s == "kl_prior") return ObjectiveKind::kl_prior;
    if (s == "kl_disjoint") return ObjectiveKind::kl_disjoint;
    throw ConfigError("unknown objective kind: " + s);
}

std::string to_string(ObjectiveKind k) {
    switch (k) {
        case ObjectiveKind::mi: return "mi";
        case ObjectiveKind::kl_prior: return "kl_prior";
        case ObjectiveKind::kl_disjoint: return "kl_disjoint";
    }
    return "mi";
}

void ObjectiveSpec::validate() const {
    if (kind == ObjectiveKind::kl_prior && !reference)
        throw ConfigError("kl_prior objective requires a reference");
}

bool ObjectiveValue::has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

std::string to_json(const ObjectiveValue& v) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"kind\":\"" << to_string(v.kind) << "\",\"value_nats\":" << v.value_nats
       << ",\"fc\":" << v.fc << ",\"n_correct\":" << v.n_correct
       << ",\"n_incorrect\":" << v.n_incorrect << ",\"flags\":[";
    for (std::size_t i = 0; i < v.flags.size(); ++i) {
        if (i) os << ",";
        os << '"' << v.flags[i] << '"';
    }
    os << "]}";
    return os.str();
}

namespace {

void merge_flags(std::vector<std::string>* dst, const std::vector<std::string>& src) {
    if (!dst) return;
    for (const auto& f : src) {
        if (std::find(dst->begin(), dst->end(), f) == dst->end()) dst->push_back(f);
    }
}

void add_flag(std::vector<std::string>* dst, const char* f) {
    if (dst && std::find(dst->begin(), dst->end(), f) == dst->end()) dst->push_back(f);
}

void split_by_outcome(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                      std::vector<double>& incorrect, std::vector<double>& correct) {
    if (a_end.size() != outcomes.size())
        throw LengthMismatch("a_end and outcomes differ in length");
    for (std::size_t i = 0; i < a_end.size(); ++i)
        (outcomes[i] != 0 ? correct : incorrect).push_back(a_end[i]);
}

// One directed divergence of `fitted` against a class reference.
double class_divergence(const std::vector<double>& fitted, const std::vector<double>& ref_samples,
                        const std::optional<std::pair<double, double>>& ref_gauss,
                        const EstimatorConfig& cfg, std::vector<std::string>* flags) {
    const SampleSet p = SampleSet::from_vector(fitted);
    EstimatorResult r;
    if (ref_gauss) {
        r = kl_to_gaussian(p, ref_gauss->first, ref_gauss->second, cfg);
    } else {
        r = kl_knn(p, SampleSet::from_vector(ref_samples), cfg);
    }
    merge_flags(flags, r.flags);
    return r.value_nats;
}

}  // namespace

double objective_mi(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                    const EstimatorConfig& cfg, std::vector<std::string>* flags) {
    if (a_end.size() != outcomes.size())
        throw LengthMismatch("a_end and outcomes differ in length");
    LabeledSampleSet s;
    s.values = Eigen::Map<const Eigen::MatrixXd>(a_end.data(), static_cast<long>(a_end.size()), 1);
    s.labels = outcomes;
    const EstimatorResult r = mi_mixed(s, cfg);
    merge_flags(flags, r.flags);
    return r.value_nats;
}

double objective_kl_prior(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                          const ClassReference& reference, const EstimatorConfig& cfg,
                          std::vector<std::string>* flags) {
    std::vector<double> fit0, fit1;
    split_by_outcome(a_end, outcomes, fit0, fit1);

    // A class too small for the estimator counts as empty for sentinel purposes.
    const auto k = static_cast<std::size_t>(cfg.k);
    const bool ref0_unusable = !reference.gauss_incorrect && reference.samples_incorrect.size() < k;
    const bool ref1_unusable = !reference.gauss_correct && reference.samples_correct.size() < k;
    if (fit0.size() <= k || fit1.size() <= k || ref0_unusable || ref1_unusable) {
        add_flag(flags, objflag::empty_class);
        return std::numeric_limits<double>::infinity();
    }

    const double d0 = class_divergence(fit0, reference.samples_incorrect,
                                       reference.gauss_incorrect, cfg, flags);
    const double d1 = class_divergence(fit1, reference.samples_correct,
                                       reference.gauss_correct, cfg, flags);
    return d0 + d1;
}

double objective_kl_disjoint(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                             const EstimatorConfig& cfg, std::vector<std::string>* flags) {
    std::vector<double> fit0, fit1;
    split_by_outcome(a_end, outcomes, fit0, fit1);

    const auto k = static_cast<std::size_t>(cfg.k);
    if (fit0.size() <= k || fit1.size() <= k) {
        add_flag(flags, objflag::empty_class);
        return 0.0;
    }

    const SampleSet s0 = SampleSet::from_vector(fit0);
    const SampleSet s1 = SampleSet::from_vector(fit1);
    const EstimatorResult d10 = kl_knn(s1, s0, cfg);
    const EstimatorResult d01 = kl_knn(s0, s1, cfg);
    merge_flags(flags, d10.flags);
    merge_flags(flags, d01.flags);
    return d10.value_nats + d01.value_nats;
}

double constraint_fc(const std::vector<double>& a_end, const std::vector<int>& outcomes,
                     std::vector<std::string>* flags) {
    std::vector<double> fit0, fit1;
    split_by_outcome(a_end, outcomes, fit0, fit1);
    if (fit0.empty() || fit1.empty()) {
        add_flag(flags, objflag::empty_class);
        return -std::numeric_limits<double>::infinity();
    }
    const double mean1 = std::accumulate(fit1.begin(), fit1.end(), 0.0) / static_cast<double>(fit1.size());
    const double mean0 = std::accumulate(fit0.begin(), fit0.end(), 0.0) / static_cast<double>(fit0.size());
    return mean1 - mean0;
}

namespace {

double dispatch_objective(const ObjectiveSpec& spec, const std::vector<double>& a_end,
                          const std::vector<int>& outcomes, std::vector<std::string>* flags) {
    switch (spec.kind) {
        case ObjectiveKind::mi:
            return objective_mi(a_end, outcomes, spec.estimator, flags);
        case ObjectiveKind::kl_prior:
            return objective_kl_prior(a_end, outcomes, *spec.reference, spec.estimator, flags);
        case ObjectiveKind::kl_disjoint:
            return objective_kl_disjoint(a_end, outcomes, spec.estimator, flags);
    }
    throw ConfigError("unhandled objective kind");
}

}  // namespace

ObjectiveValue evaluate_objective(const ObjectiveSpec& spec, const Dataset& data,
                                  const CogParams& candidate, double step) {
    spec.validate();
    candidate.validate();
    if (data.series.empty()) throw ConfigError("dataset has no series");

    std::vector<std::vector<double>> fitted(data.series.size());
    for (std::size_t i = 0; i < data.series.size(); ++i) {
        Trajectory traj = integrate_schedule(candidate, data.series[i].schedule, step, 0);
        fitted[i] = std::move(traj.a_end);
        if (fitted[i].size() != data.series[i].outcomes.size())
            throw LengthMismatch("re-integrated a_end count differs from stored outcomes");
    }

    ObjectiveValue out;
    out.kind = spec.kind;

    if (spec.pool_series) {
        std::vector<double> a_end;
        std::vector<int> outcomes;
        for (std::size_t i = 0; i < data.series.size(); ++i) {
            a_end.insert(a_end.end(), fitted[i].begin(), fitted[i].end());
            const auto& o = data.series[i].outcomes;
            outcomes.insert(outcomes.end(), o.begin(), o.end());
        }
        out.value_nats = dispatch_objective(spec, a_end, outcomes, &out.flags);
        out.fc = constraint_fc(a_end, outcomes, &out.flags);
        for (int o : outcomes) (o != 0 ? out.n_correct : out.n_incorrect) += 1;
    } else {
        double value_sum = 0.0, fc_sum = 0.0;
        for (std::size_t i = 0; i < data.series.size(); ++i) {
            const auto& o = data.series[i].outcomes;
            value_sum += dispatch_objective(spec, fitted[i], o, &out.flags);
            fc_sum += constraint_fc(fitted[i], o, &out.flags);
            for (int v : o) (v != 0 ? out.n_correct : out.n_incorrect) += 1;
        }
        const auto ns = static_cast<double>(data.series.size());
        out.value_nats = value_sum / ns;
        out.fc = fc_sum / ns;
    }
    return out;
}

ClassReference reference_from_dataset(const Dataset& data) {
    ClassReference ref;
    split_by_outcome(data.pooled_a_end_true(), data.pooled_outcomes(), ref.samples_incorrect,
                     ref.samples_correct);
    return ref;
}

ClassReference gaussian_reference_from_dataset(const Dataset& data) {
    std::vector<double> s0, s1;
    split_by_outcome(data.pooled_a_end_true(), data.pooled_outcomes(), s0, s1);

    auto fit_gauss = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.size() < 2) throw DegeneratePool("too few samples for a Gaussian reference");
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sigma = std::sqrt(ss / static_cast<double>(v.size() - 1));
        if (!(sigma > 0.0)) throw DegeneratePool("zero variance in Gaussian reference");
        return {mean, sigma};
    };

    ClassReference ref;
    ref.gauss_incorrect = fit_gauss(s0);
    ref.gauss_correct = fit_gauss(s1);
    return ref;
}

}  // namespace infofit
