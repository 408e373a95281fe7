#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace infofit {

// N points in d-dimensional real space; rows are points.
struct SampleSet {
    Eigen::MatrixXd points;

    SampleSet() = default;
    explicit SampleSet(Eigen::MatrixXd m) : points(std::move(m)) {}

    static SampleSet from_vector(const std::vector<double>& v);

    long n() const { return points.rows(); }
    long dim() const { return points.cols(); }

    bool all_rows_identical() const;
    // Throws ConfigError on non-finite entries or an empty set.
    void require_valid() const;
};

// Continuous values paired with discrete category codes.
struct LabeledSampleSet {
    Eigen::MatrixXd values;
    std::vector<int> labels;

    long n() const { return values.rows(); }
    long dim() const { return values.cols(); }
    void require_valid() const;
};

// Tie-breaking jitter in [0, scale * per-coordinate-range) added to every
// coordinate. The draw for a point is a function of (seed, the point's byte
// representation, its ordinal among exact duplicates), never of its row
// index, so the jittered multiset is invariant under row permutations.
SampleSet apply_jitter(const SampleSet& s, double scale, std::uint64_t seed);

}  // namespace infofit
