#include "infofit/estimators.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <Eigen/Eigenvalues>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <sstream>

#include "infofit/common.hpp"

namespace infofit {

namespace {

double digamma(double x) { return boost::math::digamma(x); }

void validate_config(const EstimatorConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("estimator k must be >= 1");
    if (cfg.lnc_alpha <= 0.0 || cfg.lnc_alpha > 1.0)
        throw ConfigError("lnc_alpha must lie in (0, 1]");
    if (cfg.jitter_scale < 0.0 || cfg.jitter_scale > 1e-8)
        throw ConfigError("jitter_scale must lie in [0, 1e-8]");
}

double chebyshev(const Eigen::MatrixXd& m, long i, long j) {
    return (m.row(i) - m.row(j)).cwiseAbs().maxCoeff();
}

// k-th smallest Chebyshev distance from row i to the other rows; optionally
// the indices of those k nearest rows (order within the k unspecified).
double kth_neighbor_distance(const Eigen::MatrixXd& pts, long i, int k,
                             std::vector<long>* neighbors = nullptr) {
    const long n = pts.rows();
    thread_local std::vector<double> dist;
    thread_local std::vector<long> idx;
    dist.resize(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) dist[static_cast<std::size_t>(j)] = chebyshev(pts, i, j);
    dist[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();

    if (!neighbors) {
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        return dist[static_cast<std::size_t>(k - 1)];
    }

    idx.resize(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0L);
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(),
                     [&](long a, long b) {
                         return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
                     });
    neighbors->assign(idx.begin(), idx.begin() + k);
    return dist[static_cast<std::size_t>(idx[static_cast<std::size_t>(k - 1)])];
}

// Count of rows j != i with Chebyshev distance strictly below radius.
long count_within(const Eigen::MatrixXd& pts, long i, double radius) {
    long count = 0;
    for (long j = 0; j < pts.rows(); ++j) {
        if (j != i && chebyshev(pts, i, j) < radius) ++count;
    }
    return count;
}

// Kozachenko-Leonenko on pre-jittered points, nats.
double entropy_core(const Eigen::MatrixXd& pts, int k) {
    const long n = pts.rows();
    const long d = pts.cols();
    double mean_log = 0.0;
    for (long i = 0; i < n; ++i) {
        const double eps = kth_neighbor_distance(pts, i, k);
        mean_log += std::log(2.0 * eps);
    }
    mean_log /= static_cast<double>(n);
    return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
           static_cast<double>(d) * mean_log;
}

// Sorted-column counting for 1-d marginals; open interval (v - r, v + r).
struct SortedMarginal {
    std::vector<double> sorted;

    explicit SortedMarginal(const Eigen::MatrixXd& col) {
        sorted.assign(col.data(), col.data() + col.rows());
        std::sort(sorted.begin(), sorted.end());
    }

    long count_within(double v, double radius) const {
        auto lo = std::upper_bound(sorted.begin(), sorted.end(), v - radius);
        auto hi = std::lower_bound(sorted.begin(), sorted.end(), v + radius);
        long c = static_cast<long>(hi - lo) - 1;  // excludes the point itself
        return c < 0 ? 0 : c;
    }
};

long marginal_count(const Eigen::MatrixXd& m, const SortedMarginal* fast, long i, double radius) {
    if (fast) return fast->count_within(m(i, 0), radius);
    return count_within(m, i, radius);
}

struct KsgParts {
    double raw = 0.0;
    Eigen::MatrixXd joint;
};

KsgParts ksg_core(const SampleSet& jx, const SampleSet& jy, int k) {
    const long n = jx.n();
    Eigen::MatrixXd joint(n, jx.dim() + jy.dim());
    joint << jx.points, jy.points;

    Eigen::VectorXd eps(n);
    for (long i = 0; i < n; ++i) eps(i) = kth_neighbor_distance(joint, i, k);

    std::unique_ptr<SortedMarginal> fx, fy;
    if (jx.dim() == 1) fx = std::make_unique<SortedMarginal>(jx.points);
    if (jy.dim() == 1) fy = std::make_unique<SortedMarginal>(jy.points);

    double mean_psi = 0.0;
    for (long i = 0; i < n; ++i) {
        const long nx = marginal_count(jx.points, fx.get(), i, eps(i));
        const long ny = marginal_count(jy.points, fy.get(), i, eps(i));
        mean_psi += digamma(static_cast<double>(nx + 1)) + digamma(static_cast<double>(ny + 1));
    }
    mean_psi /= static_cast<double>(n);

    KsgParts parts;
    parts.raw = digamma(static_cast<double>(k)) + digamma(static_cast<double>(n)) - mean_psi;
    parts.joint = std::move(joint);
    return parts;
}

// Log-volume of the bounding box of pre-centered points, optionally after
// rotation into the given basis. Returns false when the box is flat to
// machine precision.
bool log_box_volume(const Eigen::MatrixXd& centered, const Eigen::MatrixXd* basis, double& out) {
    const Eigen::MatrixXd proj = basis ? (centered * *basis).eval() : centered;
    out = 0.0;
    for (long j = 0; j < proj.cols(); ++j) {
        const double half_width = proj.col(j).cwiseAbs().maxCoeff();
        if (half_width <= 0.0) return false;
        out += std::log(2.0 * half_width);
    }
    return true;
}

// Mean over all points of ln(V_pca / V_axis) for the point's joint-space
// neighborhood (the point plus its k nearest neighbors), restricted to
// points where the ratio falls below alpha. Always <= 0.
double lnc_correction(const Eigen::MatrixXd& joint, int k, double alpha,
                      long& degenerate_neighborhoods) {
    const long n = joint.rows();
    const long d = joint.cols();
    const double log_alpha = std::log(alpha);

    double sum = 0.0;
    std::vector<long> nbr;
    Eigen::MatrixXd local(k + 1, d);
    for (long i = 0; i < n; ++i) {
        kth_neighbor_distance(joint, i, k, &nbr);
        local.row(0) = joint.row(i);
        for (int m = 0; m < k; ++m) local.row(m + 1) = joint.row(nbr[static_cast<std::size_t>(m)]);
        local.rowwise() -= local.colwise().mean().eval();

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(local.transpose() * local);
        const Eigen::MatrixXd basis = es.eigenvectors();

        double log_v_pca = 0.0, log_v_axis = 0.0;
        if (!log_box_volume(local, &basis, log_v_pca) || !log_box_volume(local, nullptr, log_v_axis)) {
            ++degenerate_neighborhoods;
            continue;
        }
        const double log_ratio = log_v_pca - log_v_axis;
        if (log_ratio < log_alpha) sum += log_ratio;
    }
    return sum / static_cast<double>(n);
}

EstimatorResult make_result(double raw, double reported, int k, long n) {
    EstimatorResult r;
    r.raw_nats = raw;
    r.value_nats = reported;
    r.k = k;
    r.n = n;
    return r;
}

}  // namespace

bool EstimatorResult::has_flag(std::string_view f) const {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

double EstimatorResult::value(Units u) const {
    return u == Units::nats ? value_nats : value_nats / std::numbers::ln2;
}

std::string to_json(const EstimatorResult& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"value_nats\":" << r.value_nats << ",\"k\":" << r.k << ",\"n\":" << r.n
       << ",\"flags\":[";
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
        if (i) os << ",";
        os << '"' << r.flags[i] << '"';
    }
    os << "]}";
    return os.str();
}

EstimatorResult entropy_knn(const SampleSet& s, const EstimatorConfig& cfg) {
    validate_config(cfg);
    s.require_valid();
    if (s.n() <= cfg.k) throw TooFewSamples("entropy_knn requires n >= k + 1");

    if (s.all_rows_identical()) {
        auto r = make_result(std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(), cfg.k, s.n());
        r.flags.push_back(flag::degenerate_input);
        return r;
    }

    const SampleSet js = apply_jitter(s, cfg.jitter_scale, derive_seed(cfg.seed, 0));
    const double h = entropy_core(js.points, cfg.k);
    return make_result(h, h, cfg.k, s.n());
}

EstimatorResult mi_ksg(const SampleSet& x, const SampleSet& y, const EstimatorConfig& cfg) {
    validate_config(cfg);
    x.require_valid();
    y.require_valid();
    if (x.n() != y.n()) throw LengthMismatch("mi_ksg requires equally many x and y samples");
    if (x.n() <= cfg.k) throw TooFewSamples("mi_ksg requires n >= k + 1");

    if (x.all_rows_identical() || y.all_rows_identical()) {
        auto r = make_result(0.0, 0.0, cfg.k, x.n());
        r.flags.push_back(flag::degenerate_input);
        return r;
    }

    const SampleSet jx = apply_jitter(x, cfg.jitter_scale, derive_seed(cfg.seed, 0));
    const SampleSet jy = apply_jitter(y, cfg.jitter_scale, derive_seed(cfg.seed, 1));
    const KsgParts parts = ksg_core(jx, jy, cfg.k);

    auto r = make_result(parts.raw, std::max(parts.raw, 0.0), cfg.k, x.n());
    if (parts.raw < 0.0) r.flags.push_back(flag::clamped);
    return r;
}

EstimatorResult mi_lnc(const SampleSet& x, const SampleSet& y, const EstimatorConfig& cfg) {
    validate_config(cfg);
    x.require_valid();
    y.require_valid();
    if (x.n() != y.n()) throw LengthMismatch("mi_lnc requires equally many x and y samples");
    if (x.n() <= cfg.k) throw TooFewSamples("mi_lnc requires n >= k + 1");

    if (x.all_rows_identical() || y.all_rows_identical()) {
        auto r = make_result(0.0, 0.0, cfg.k, x.n());
        r.flags.push_back(flag::degenerate_input);
        return r;
    }

    const long joint_dim = x.dim() + y.dim();
    if (cfg.k < joint_dim + 1) {
        auto r = mi_ksg(x, y, cfg);
        r.flags.push_back(flag::lnc_fallback);
        return r;
    }

    const SampleSet jx = apply_jitter(x, cfg.jitter_scale, derive_seed(cfg.seed, 0));
    const SampleSet jy = apply_jitter(y, cfg.jitter_scale, derive_seed(cfg.seed, 1));
    const KsgParts parts = ksg_core(jx, jy, cfg.k);

    long degenerate = 0;
    const double correction = lnc_correction(parts.joint, cfg.k, cfg.lnc_alpha, degenerate);
    const double raw = parts.raw - correction;

    auto r = make_result(raw, std::max(raw, 0.0), cfg.k, x.n());
    if (raw < 0.0) r.flags.push_back(flag::clamped);
    if (degenerate > 0) r.flags.push_back(flag::lnc_degenerate_neighborhood);
    return r;
}

EstimatorResult mi_mixed(const LabeledSampleSet& s, const EstimatorConfig& cfg) {
    validate_config(cfg);
    s.require_valid();
    if (s.n() <= cfg.k) throw TooFewSamples("mi_mixed requires n >= k + 1");

    std::map<int, std::vector<long>> classes;
    for (long i = 0; i < s.n(); ++i) classes[s.labels[static_cast<std::size_t>(i)]].push_back(i);

    if (classes.size() == 1) {
        auto r = make_result(0.0, 0.0, cfg.k, s.n());
        r.flags.push_back(flag::single_class);
        return r;
    }

    SampleSet values(s.values);
    if (values.all_rows_identical()) {
        auto r = make_result(0.0, 0.0, cfg.k, s.n());
        r.flags.push_back(flag::degenerate_input);
        return r;
    }

    const SampleSet jv = apply_jitter(values, cfg.jitter_scale, derive_seed(cfg.seed, 0));
    const double h_all = entropy_core(jv.points, cfg.k);

    bool dropped = false;
    double h_cond = 0.0;
    for (const auto& [label, rows] : classes) {
        const auto n_c = static_cast<long>(rows.size());
        if (n_c <= cfg.k) {
            dropped = true;
            continue;
        }
        Eigen::MatrixXd sub(n_c, jv.dim());
        for (long r = 0; r < n_c; ++r) sub.row(r) = jv.points.row(rows[static_cast<std::size_t>(r)]);
        const double weight = static_cast<double>(n_c) / static_cast<double>(s.n());
        h_cond += weight * entropy_core(sub, cfg.k);
    }

    const double mi = h_all - h_cond;
    auto r = make_result(mi, mi, cfg.k, s.n());
    if (dropped) r.flags.push_back(flag::small_class_dropped);
    return r;
}

EstimatorResult kl_knn(const SampleSet& p, const SampleSet& q, const EstimatorConfig& cfg) {
    validate_config(cfg);
    p.require_valid();
    q.require_valid();
    if (p.dim() != q.dim()) throw DimensionMismatch("kl_knn requires equal dimensions");
    if (p.n() <= cfg.k) throw TooFewSamples("kl_knn requires p.n >= k + 1");
    if (q.n() < cfg.k) throw TooFewSamples("kl_knn requires q.n >= k");

    const SampleSet jp = apply_jitter(p, cfg.jitter_scale, derive_seed(cfg.seed, 0));
    const SampleSet jq = apply_jitter(q, cfg.jitter_scale, derive_seed(cfg.seed, 1));

    const long n = jp.n();
    const long m = jq.n();
    const long d = jp.dim();

    // Bit-identical q rows are treated like the self-exclusion in rho: a
    // literal copy of p_i inside q is not an independent sample, and keeping
    // it biases D(P||P) to ~-1/k instead of ~0.
    std::vector<double> dist;
    dist.reserve(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (long i = 0; i < n; ++i) {
        const double rho = kth_neighbor_distance(jp.points, i, cfg.k);
        dist.clear();
        for (long j = 0; j < m; ++j) {
            if (q.points.row(j) == p.points.row(i)) continue;
            dist.push_back((jq.points.row(j) - jp.points.row(i)).cwiseAbs().maxCoeff());
        }
        if (static_cast<long>(dist.size()) < cfg.k)
            throw TooFewSamples("kl_knn: not enough distinct q samples");
        std::nth_element(dist.begin(), dist.begin() + (cfg.k - 1), dist.end());
        const double nu = dist[static_cast<std::size_t>(cfg.k - 1)];
        sum += std::log(nu / rho);
    }

    const double div = static_cast<double>(d) / static_cast<double>(n) * sum +
                       std::log(static_cast<double>(m) / static_cast<double>(n - 1));
    return make_result(div, div, cfg.k, n);
}

EstimatorResult kl_to_gaussian(const SampleSet& p, double mu, double sigma,
                               const EstimatorConfig& cfg) {
    validate_config(cfg);
    p.require_valid();
    if (p.dim() != 1) throw DimensionMismatch("kl_to_gaussian requires 1-d samples");
    if (sigma <= 0.0) throw NonPositiveSigma("kl_to_gaussian requires sigma > 0");
    if (p.n() <= cfg.k) throw TooFewSamples("kl_to_gaussian requires n >= k + 1");

    const EstimatorResult h = entropy_knn(p, cfg);
    if (h.has_flag(flag::degenerate_input)) {
        auto r = make_result(std::numeric_limits<double>::quiet_NaN(),
                             std::numeric_limits<double>::quiet_NaN(), cfg.k, p.n());
        r.flags.push_back(flag::degenerate_input);
        return r;
    }

    const double log_norm = -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
    double cross = 0.0;
    for (long i = 0; i < p.n(); ++i) {
        const double z = (p.points(i, 0) - mu) / sigma;
        cross += log_norm - 0.5 * z * z;
    }
    cross /= static_cast<double>(p.n());

    const double div = -h.raw_nats - cross;
    return make_result(div, div, cfg.k, p.n());
}

}  // namespace infofit
