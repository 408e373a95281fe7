#include "infofit/samples.hpp"

#include <cmath>
#include <cstring>
#include <unordered_map>

#include "infofit/common.hpp"

namespace infofit {

SampleSet SampleSet::from_vector(const std::vector<double>& v) {
    Eigen::MatrixXd m(static_cast<long>(v.size()), 1);
    for (long i = 0; i < m.rows(); ++i) m(i, 0) = v[static_cast<std::size_t>(i)];
    return SampleSet(std::move(m));
}

bool SampleSet::all_rows_identical() const {
    for (long i = 1; i < n(); ++i) {
        if (points.row(i) != points.row(0)) return false;
    }
    return true;
}

void SampleSet::require_valid() const {
    if (n() < 1 || dim() < 1) throw ConfigError("sample set must be non-empty");
    if (!points.allFinite()) throw ConfigError("sample set contains non-finite entries");
}

void LabeledSampleSet::require_valid() const {
    if (n() < 1 || dim() < 1) throw ConfigError("labeled sample set must be non-empty");
    if (!values.allFinite()) throw ConfigError("labeled sample set contains non-finite entries");
    if (static_cast<long>(labels.size()) != n())
        throw LengthMismatch("labels and values differ in length");
}

namespace {

std::uint64_t row_hash(const Eigen::MatrixXd& m, long i) {
    // Hash the raw bytes of the row; rows compare equal iff bytes do
    // (inputs are required finite, and -0.0 vs 0.0 duplicates only shuffle
    // jitter among near-identical points).
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (long j = 0; j < m.cols(); ++j) {
        double v = m(i, j);
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

}  // namespace

SampleSet apply_jitter(const SampleSet& s, double scale, std::uint64_t seed) {
    if (scale <= 0.0) return s;
    const long n = s.n(), d = s.dim();

    Eigen::VectorXd magnitude(d);
    for (long j = 0; j < d; ++j) {
        double range = s.points.col(j).maxCoeff() - s.points.col(j).minCoeff();
        if (range <= 0.0) range = 1.0;  // constant coordinate: unit reference scale
        magnitude(j) = scale * range;
    }

    SampleSet out = s;
    std::unordered_map<std::uint64_t, std::uint64_t> dup_ordinal;
    for (long i = 0; i < n; ++i) {
        const std::uint64_t h = row_hash(s.points, i);
        const std::uint64_t ordinal = dup_ordinal[h]++;
        std::uint64_t state = seed ^ h ^ (0x9e3779b97f4a7c15ull * (ordinal + 1));
        for (long j = 0; j < d; ++j) {
            const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
            out.points(i, j) += u * magnitude(j);
        }
    }
    return out;
}

}  // namespace infofit
