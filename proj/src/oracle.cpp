#include "hackint/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hackint::oracle {

namespace {

// First dim primes for the Halton sequence.
constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double halton(std::int64_t index, int base) {
    double f = 1.0, r = 0.0;
    std::int64_t i = index + 1; // skip the all-zeros point
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

double halton_for_dir(std::int64_t index, int base) { return halton(index, base); }

struct Hull {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    VectorXd lo_point, hi_point;
    std::int64_t feasible = 0;

    void absorb(double value, const VectorXd& point) {
        ++feasible;
        if (value < lo) {
            lo = value;
            lo_point = point;
        }
        if (value > hi) {
            hi = value;
            hi_point = point;
        }
    }
};

constexpr double kInvPhi = 0.6180339887498949;

// Golden-section walk along one coordinate, maximizing sign*stat over the
// feasible slice (infeasible points count as -inf). Every feasible point
// touched is absorbed into the hull. Returns the gain in sign*stat.
double polish_coordinate(const ScalarFn& loss, const ScalarFn& stat, double theta,
                         const std::pair<double, double>& bounds, int coord, int evals,
                         double sign, VectorXd& point, Hull& hull) {
    double a = bounds.first, b = bounds.second;
    auto value_at = [&](double t) {
        VectorXd q = point;
        q(coord) = t;
        if (loss(q) > theta) return -std::numeric_limits<double>::infinity();
        const double v = stat(q);
        hull.absorb(v, q);
        return sign * v;
    };
    const double before = value_at(point(coord));
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = value_at(c), fd = value_at(d);
    for (int it = 0; it < evals; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = value_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = value_at(d);
        }
    }
    const double t = fc > fd ? c : d;
    const double ft = std::max(fc, fd);
    if (std::isfinite(ft) && ft > before) {
        point(coord) = t;
        return std::isfinite(before) ? ft - before : 0.0;
    }
    return 0.0;
}

// Golden-section minimization of the loss along one coordinate; pulls the
// point off the constraint boundary so the statistic passes can make
// progress again. Returns the loss decrease.
double recenter_coordinate(const ScalarFn& loss, const std::pair<double, double>& bounds,
                           int coord, int evals, VectorXd& point) {
    double a = bounds.first, b = bounds.second;
    auto loss_at = [&](double t) {
        VectorXd q = point;
        q(coord) = t;
        return loss(q);
    };
    const double before = loss_at(point(coord));
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = loss_at(c), fd = loss_at(d);
    for (int it = 0; it < evals; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = loss_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = loss_at(d);
        }
    }
    const double t = fc < fd ? c : d;
    const double ft = std::min(fc, fd);
    if (ft < before) {
        point(coord) = t;
        return before - ft;
    }
    return 0.0;
}

// Range of step sizes keeping point + t*dir inside the box.
std::pair<double, double> segment_in_box(const VectorXd& point, const VectorXd& dir,
                                         const std::vector<std::pair<double, double>>& box) {
    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    for (int c = 0; c < point.size(); ++c) {
        if (std::fabs(dir(c)) < 1e-300) continue;
        const double a = (box[c].first - point(c)) / dir(c);
        const double b = (box[c].second - point(c)) / dir(c);
        t_lo = std::max(t_lo, std::min(a, b));
        t_hi = std::min(t_hi, std::max(a, b));
    }
    return {t_lo, t_hi};
}

// Golden-section along an arbitrary direction, maximizing sign*stat over the
// feasible segment.
double polish_direction(const ScalarFn& loss, const ScalarFn& stat, double theta,
                        const std::vector<std::pair<double, double>>& box, const VectorXd& dir,
                        int evals, double sign, VectorXd& point, Hull& hull) {
    auto [a, b] = segment_in_box(point, dir, box);
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) return 0.0;
    auto value_at = [&](double t) {
        const VectorXd q = point + t * dir;
        if (loss(q) > theta) return -std::numeric_limits<double>::infinity();
        const double v = stat(q);
        hull.absorb(v, q);
        return sign * v;
    };
    const double before = value_at(0.0);
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = value_at(c), fd = value_at(d);
    for (int it = 0; it < evals; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = value_at(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = value_at(d);
        }
    }
    const double t = fc > fd ? c : d;
    const double ft = std::max(fc, fd);
    if (std::isfinite(ft) && ft > before) {
        point += t * dir;
        return std::isfinite(before) ? ft - before : 0.0;
    }
    return 0.0;
}

// Fixed quasi-random unit directions; identical for every call so polish
// replays exactly across budget prefixes.
std::vector<VectorXd> direction_set(int dim, int count) {
    std::vector<VectorXd> dirs;
    dirs.reserve(count);
    for (int k = 0; k < count; ++k) {
        VectorXd d(dim);
        double norm2 = 0.0;
        for (int c = 0; c < dim; ++c) {
            d(c) = 2.0 * halton_for_dir(k + 37, kPrimes[c]) - 1.0;
            norm2 += d(c) * d(c);
        }
        if (norm2 < 1e-12) continue;
        dirs.push_back(d / std::sqrt(norm2));
    }
    return dirs;
}

// Alternate statistic pushes with loss recentering. A linear statistic over
// a curved feasible set stalls under pure coordinate moves at the boundary;
// the recentering step restores slack, and the extra oblique directions
// handle creases in nonsmooth losses where axis moves jam.
void polish_from(const ScalarFn& loss, const ScalarFn& stat, double theta,
                 const OracleBudget& budget, VectorXd start, double sign, Hull& hull) {
    if (start.size() == 0) return;
    constexpr int kMaxPasses = 60;
    const auto dirs = direction_set(static_cast<int>(start.size()),
                                    2 * static_cast<int>(start.size()) + 4);
    for (int pass = 0; pass < kMaxPasses; ++pass) {
        double gain = 0.0;
        for (int c = 0; c < start.size(); ++c)
            gain += polish_coordinate(loss, stat, theta, budget.box[c], c, budget.refine_steps,
                                      sign, start, hull);
        for (const auto& d : dirs)
            gain += polish_direction(loss, stat, theta, budget.box, d, budget.refine_steps,
                                     sign, start, hull);
        double slack_gain = 0.0;
        for (int c = 0; c < start.size(); ++c)
            slack_gain += recenter_coordinate(loss, budget.box[c], c, budget.refine_steps, start);
        if (gain < 1e-13 && slack_gain < 1e-13) break;
    }
    // One final statistic sweep after the last recenter.
    for (int c = 0; c < start.size(); ++c)
        polish_coordinate(loss, stat, theta, budget.box[c], c, budget.refine_steps, sign, start,
                          hull);
}

// Sample-index layout for a given budget: the leading 3/4 of the budget is
// the Halton sweep, the rest Gaussian perturbation rounds. Both streams are
// indexed from zero, so a doubled budget evaluates a superset of points.
std::int64_t lds_share(std::int64_t samples) {
    return std::max<std::int64_t>(1, (samples * 3) / 4);
}

} // namespace

OracleResult brute_force_interval(const ScalarFn& loss, const ScalarFn& stat,
                                  double theta, const OracleBudget& budget) {
    const int dim = static_cast<int>(budget.box.size());
    if (dim < 1 || dim > 16)
        throw Error(errc::invalid_config, "oracle box must have 1..16 dimensions");
    if (budget.samples < 1)
        throw Error(errc::invalid_config, "oracle needs samples >= 1");
    for (const auto& [lo, hi] : budget.box)
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi))
            throw Error(errc::invalid_config, "oracle box must be finite");

    Hull hull;
    VectorXd best_loss_point;
    double best_loss = std::numeric_limits<double>::infinity();
    VectorXd anchor;
    const std::int64_t anchor_prefix = 256;

    VectorXd point(dim);
    auto eval_point = [&]() {
        const double l = loss(point);
        if (l < best_loss) {
            best_loss = l;
            best_loss_point = point;
        }
        if (l <= theta) hull.absorb(stat(point), point);
    };

    std::int64_t lds_done = 0, gauss_done = 0;
    auto run_until = [&](std::int64_t samples) {
        const std::int64_t lds_target = lds_share(samples);
        const std::int64_t gauss_target = samples - lds_target;
        for (; lds_done < lds_target; ++lds_done) {
            for (int c = 0; c < dim; ++c) {
                const auto& [lo, hi] = budget.box[c];
                point(c) = lo + (hi - lo) * halton(lds_done, kPrimes[c]);
            }
            eval_point();
            if (lds_done + 1 == anchor_prefix) anchor = best_loss_point;
        }
        if (anchor.size() == 0) anchor = best_loss_point;
        for (; gauss_done < gauss_target; ++gauss_done) {
            std::mt19937_64 rng(budget.seed * 0x9e3779b97f4a7c15ULL + 0x51ed2701 + gauss_done);
            std::normal_distribution<double> gauss(0.0, 1.0);
            const double scale = std::pow(10.0, -static_cast<double>(gauss_done % 4));
            for (int c = 0; c < dim; ++c) {
                const auto& [lo, hi] = budget.box[c];
                const double width = hi - lo;
                point(c) = std::clamp(anchor(c) + gauss(rng) * scale * 0.25 * width, lo, hi);
            }
            eval_point();
        }
    };

    // Power-of-two checkpoints: polish starts are the hull incumbents at
    // every prefix budget, so a doubled budget replays all polish work of
    // the smaller one and the reported interval can only widen.
    std::vector<std::pair<VectorXd, double>> polish_starts; // (point, sign)
    std::vector<std::int64_t> checkpoints;
    for (std::int64_t c = budget.samples; c >= 512; c /= 2) checkpoints.push_back(c);
    std::sort(checkpoints.begin(), checkpoints.end());
    if (checkpoints.empty() || checkpoints.back() != budget.samples)
        checkpoints.push_back(budget.samples);

    for (std::int64_t cp : checkpoints) {
        run_until(cp);
        if (hull.feasible > 0) {
            polish_starts.emplace_back(hull.lo_point, -1.0);
            polish_starts.emplace_back(hull.hi_point, +1.0);
        }
        polish_starts.emplace_back(best_loss_point, -1.0);
        polish_starts.emplace_back(best_loss_point, +1.0);
    }

    if (hull.feasible == 0)
        throw Error(errc::no_feasible_sample,
                    "no sampled point satisfies loss <= theta (best sampled loss " +
                        std::to_string(best_loss) + ")");

    for (auto& [start, sign] : polish_starts)
        polish_from(loss, stat, theta, budget, start, sign, hull);

    OracleResult out;
    out.lower = hull.lo;
    out.upper = hull.hi;
    out.witness_lower = hull.lo_point;
    out.witness_upper = hull.hi_point;
    out.feasible_count = hull.feasible;
    return out;
}

} // namespace hackint::oracle
