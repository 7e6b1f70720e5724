#include "hackint/prescriptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hackint {

namespace {

// Row indices sorted by (distance to target, index).
std::vector<Eigen::Index> neighbor_order(const MatrixXd& x, const VectorXd& target,
                                         Eigen::Index exclude = -1) {
    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (i == exclude) continue;
        dist.emplace_back((x.row(i).transpose() - target).norm(), i);
    }
    std::sort(dist.begin(), dist.end());
    std::vector<Eigen::Index> order;
    order.reserve(dist.size());
    for (const auto& [d, i] : dist) order.push_back(i);
    return order;
}

} // namespace

KnnIntervalResult knn_interval(const KnnSpec& spec) {
    const Eigen::Index n = spec.x.rows();
    if (spec.y.size() != n)
        throw Error(errc::dimension_mismatch, "outcome length does not match row count");
    if (spec.x_new.size() != spec.x.cols())
        throw Error(errc::dimension_mismatch, "x_new length does not match feature count");
    if (spec.k_min < 1 || spec.k_min > spec.k_max || spec.k_max > n)
        throw Error(errc::empty_range, "need 1 <= k_min <= k_max <= n");

    const auto order = neighbor_order(spec.x, spec.x_new);

    KnnIntervalResult out;
    double running = 0.0;
    int best_lo_k = spec.k_min, best_hi_k = spec.k_min;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int k = 1; k <= spec.k_max; ++k) {
        running += spec.y(order[k - 1]);
        if (k < spec.k_min) continue;
        const double pred = running / k;
        out.trace.emplace_back(k, pred);
        if (pred < lo) { lo = pred; best_lo_k = k; }
        if (pred > hi) { hi = pred; best_hi_k = k; }
    }

    out.interval.lower = lo;
    out.interval.upper = hi;
    out.interval.theta = 0.0;
    out.interval.stat_at_min_loss = out.trace.front().second;
    out.interval.witness_lower = VectorXd::Constant(1, best_lo_k);
    out.interval.witness_upper = VectorXd::Constant(1, best_hi_k);
    out.interval.witness_layout = "k";
    return out;
}

int knn_select_kstar(const MatrixXd& x, const VectorXd& y, int k_min, int k_max) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw Error(errc::dimension_mismatch, "need n >= 2 for leave-one-out");
    if (k_min < 1 || k_min > k_max || k_max > n - 1)
        throw Error(errc::empty_range, "need 1 <= k_min <= k_max <= n-1");

    std::vector<std::vector<Eigen::Index>> orders(n);
    for (Eigen::Index i = 0; i < n; ++i)
        orders[i] = neighbor_order(x, x.row(i).transpose(), i);

    int best_k = k_min;
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<double> running(n, 0.0);
    for (int k = 1; k <= k_max; ++k) {
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            running[i] += y(orders[i][k - 1]);
            const double resid = y(i) - running[i] / k;
            err += resid * resid;
        }
        if (k >= k_min && err < best_err) {
            best_err = err;
            best_k = k;
        }
    }
    return best_k;
}

double adjustment_factor(double or_yu, double p0, double p1) {
    if (p0 < 0.0 || p0 > 1.0 || p1 < 0.0 || p1 > 1.0)
        throw Error(errc::invalid_config, "p0 and p1 must lie in [0,1]");
    const double den = (or_yu - 1.0) * p0 + 1.0;
    if (den <= 1e-12)
        throw Error(errc::degenerate_denominator, "adjustment factor denominator is not positive");
    return ((or_yu - 1.0) * p1 + 1.0) / den;
}

void FeatureHackConstraints::validate() const {
    if (or_yw_x <= 0.0) throw Error(errc::invalid_config, "observed odds ratio must be positive");
    if (c < 0.0 || c > 1.0) throw Error(errc::invalid_config, "c must lie in [0,1]");
    if (d < 0.0 || d >= 1.0) throw Error(errc::invalid_config, "d must lie in [0,1)");
    if (c + d > 1.0)
        throw Error(errc::invalid_config, "need c + d <= 1 so p1 = p0 + c stays a probability");
}

namespace {

FeatureIntervalResult grid_feature_interval(const FeatureHackConstraints& cons, double step) {
    FeatureIntervalResult out;
    out.via_grid = true;
    double af_lo = std::numeric_limits<double>::infinity();
    double af_hi = -std::numeric_limits<double>::infinity();
    double lo_p0 = cons.d, lo_p1 = cons.d, hi_p0 = cons.d, hi_p1 = cons.d;
    const auto steps_p0 = static_cast<long>(std::floor((1.0 - cons.d) / step)) + 1;
    for (long i = 0; i <= steps_p0; ++i) {
        const double p0 = std::min(1.0, cons.d + i * step);
        const double p1_lo = std::max(0.0, p0 - cons.c);
        const double p1_hi = std::min(1.0, p0 + cons.c);
        const auto steps_p1 = static_cast<long>(std::floor((p1_hi - p1_lo) / step)) + 1;
        for (long j = 0; j <= steps_p1; ++j) {
            const double p1 = std::min(p1_hi, p1_lo + j * step);
            const double af = adjustment_factor(cons.or_yu, p0, p1);
            if (af < af_lo) { af_lo = af; lo_p0 = p0; lo_p1 = p1; }
            if (af > af_hi) { af_hi = af; hi_p0 = p0; hi_p1 = p1; }
        }
    }
    out.af_min = af_lo;
    out.af_max = af_hi;
    out.interval.lower = cons.or_yw_x / af_hi;
    out.interval.upper = cons.or_yw_x / af_lo;
    out.interval.stat_at_min_loss = cons.or_yw_x;
    // Dividing by AF_max gives the lower endpoint, so its (p0,p1) is the
    // lower witness.
    out.interval.witness_lower = (VectorXd(2) << hi_p0, hi_p1).finished();
    out.interval.witness_upper = (VectorXd(2) << lo_p0, lo_p1).finished();
    out.interval.witness_layout = "p0,p1";
    return out;
}

} // namespace

FeatureIntervalResult new_feature_interval(const FeatureHackConstraints& cons) {
    cons.validate();
    if (cons.or_yu <= 0.0)
        throw Error(errc::invalid_config, "or_yu must be positive");
    if (cons.or_yu <= 1.0) {
        // The closed form covers only or_yu > 1; fall back to the grid.
        return grid_feature_interval(cons, 1e-4);
    }

    FeatureIntervalResult out;
    // AF_max: decreasing in p0, so p0 = d with p1 = d + c (a probability by
    // validation). AF_min: along p1 = p0 - c it increases in p0, but p1 >= 0
    // forces p0 >= c; the constrained minimizer is p0 = max(c, d). When
    // d < c this deviates from the interior-solution formula at p0 = d,
    // whose p1 = d - c would not be a probability.
    const double p1_up = cons.d + cons.c;
    const double p0_dn = std::max(cons.c, cons.d);
    const double p1_dn = p0_dn - cons.c;
    out.p1_floored = cons.d - cons.c < 0.0;
    out.af_max = adjustment_factor(cons.or_yu, cons.d, p1_up);
    out.af_min = adjustment_factor(cons.or_yu, p0_dn, p1_dn);
    out.interval.lower = cons.or_yw_x / out.af_max;
    out.interval.upper = cons.or_yw_x / out.af_min;
    out.interval.stat_at_min_loss = cons.or_yw_x;
    out.interval.witness_lower = (VectorXd(2) << cons.d, p1_up).finished();
    out.interval.witness_upper = (VectorXd(2) << p0_dn, p1_dn).finished();
    out.interval.witness_layout = "p0,p1";
    return out;
}

std::vector<FeatureSweepCell> new_feature_sweep(const FeatureHackConstraints& base,
                                                const std::vector<double>& c_values,
                                                const std::vector<double>& or_yu_values) {
    std::vector<FeatureSweepCell> cells;
    for (double oy : or_yu_values) {
        for (double c : c_values) {
            FeatureHackConstraints cons = base;
            cons.c = c;
            cons.or_yu = oy;
            cells.push_back({c, oy, new_feature_interval(cons)});
        }
    }
    std::sort(cells.begin(), cells.end(), [](const FeatureSweepCell& a, const FeatureSweepCell& b) {
        return a.or_yu != b.or_yu ? a.or_yu < b.or_yu : a.c < b.c;
    });
    return cells;
}

} // namespace hackint
