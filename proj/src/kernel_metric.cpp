#include "hackint/kernel_metric.hpp"

#include <cmath>
#include <random>

namespace hackint {

namespace {

constexpr double kWeightFloor = 1e-300;

double weighted_mean(const MatrixXd& a, double psi2, const MatrixXd& x, const VectorXd& y,
                     const VectorXd& query, Eigen::Index exclude) {
    double wsum = 0.0, ysum = 0.0;
    double wmax = 0.0;
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
        if (j == exclude) continue;
        const VectorXd diff = x.row(j).transpose() - query;
        const double d = (a * diff).squaredNorm();
        const double w = std::exp(-d / psi2);
        wmax = std::max(wmax, w);
        wsum += w;
        ysum += w * y(j);
    }
    if (wmax < kWeightFloor)
        throw Error(errc::all_weights_underflow, "every kernel weight underflowed");
    return ysum / wsum;
}

} // namespace

double kernel_predict(const MatrixXd& a, double psi_d, const MatrixXd& x, const VectorXd& y,
                      const VectorXd& query, Eigen::Index exclude_index) {
    if (psi_d <= 0.0) throw Error(errc::invalid_config, "psi_d must be positive");
    if (a.rows() != x.cols() || a.cols() != x.cols())
        throw Error(errc::dimension_mismatch, "metric A must be p x p");
    if (query.size() != x.cols())
        throw Error(errc::dimension_mismatch, "query length does not match feature count");
    if (y.size() != x.rows())
        throw Error(errc::dimension_mismatch, "outcome length does not match row count");
    return weighted_mean(a, psi_d * psi_d, x, y, query, exclude_index);
}

double kernel_loss(const MatrixXd& a, double psi_d, const MatrixXd& x, const VectorXd& y) {
    const double psi2 = psi_d * psi_d;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double f = weighted_mean(a, psi2, x, y, x.row(i).transpose(), i);
        const double r = y(i) - f;
        loss += r * r;
    }
    return loss;
}

namespace {

struct Objective {
    const MetricKernelSpec& spec;
    double sign;    // +1 maximizes the prediction, -1 minimizes
    double penalty; // exterior quadratic penalty weight; 0 = pure loss descent
    bool loss_only;

    // Underflow regions score -inf so the line search backs away from them.
    double operator()(const MatrixXd& a) const {
        try {
            if (loss_only) return -kernel_loss(a, spec.psi_d, spec.x, spec.y);
            const double pred = kernel_predict(a, spec.psi_d, spec.x, spec.y, spec.x_new);
            const double loss = kernel_loss(a, spec.psi_d, spec.x, spec.y);
            const double viol = std::max(0.0, loss - spec.theta);
            return sign * pred - penalty * viol * viol;
        } catch (const Error&) {
            return -std::numeric_limits<double>::infinity();
        }
    }
};

// Adaptive-step ascent with central finite differences.
MatrixXd ascend(const Objective& obj, MatrixXd a, int iters, double tol) {
    const Eigen::Index p = a.rows();
    double step = 0.1;
    double fa = obj(a);
    MatrixXd grad(p, p);
    for (int it = 0; it < iters; ++it) {
        for (Eigen::Index r = 0; r < p; ++r) {
            for (Eigen::Index c = 0; c < p; ++c) {
                const double h = 1e-5 * (1.0 + std::fabs(a(r, c)));
                MatrixXd ap = a, am = a;
                ap(r, c) += h;
                am(r, c) -= h;
                grad(r, c) = (obj(ap) - obj(am)) / (2.0 * h);
            }
        }
        const double gnorm = grad.norm();
        if (gnorm < tol) break;
        bool moved = false;
        for (int ls = 0; ls < 30; ++ls) {
            const MatrixXd cand = a + (step / gnorm) * grad;
            const double fc = obj(cand);
            if (fc > fa) {
                a = cand;
                fa = fc;
                step *= 1.6;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved && step < 1e-12) break;
    }
    return a;
}

} // namespace

KernelIntervalResult kernel_hacking_interval(const MetricKernelSpec& spec) {
    const Eigen::Index p = spec.x.cols();
    if (spec.psi_d <= 0.0) throw Error(errc::invalid_config, "psi_d must be positive");
    if (spec.x_new.size() != p)
        throw Error(errc::dimension_mismatch, "x_new length does not match feature count");

    const MatrixXd a0 = spec.a_init.size() > 0 ? spec.a_init : MatrixXd::Identity(p, p);
    if (a0.rows() != p || a0.cols() != p)
        throw Error(errc::dimension_mismatch, "a_init must be p x p");

    std::mt19937_64 rng(spec.opts.seed * 0x9e3779b97f4a7c15ULL + 0x7b);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto random_a = [&]() {
        MatrixXd a(p, p);
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c) a(r, c) = gauss(rng);
        return a;
    };

    std::vector<MatrixXd> starts{a0, MatrixXd::Identity(p, p), MatrixXd::Zero(p, p)};
    while (static_cast<int>(starts.size()) < std::max(3, spec.opts.restarts)) starts.push_back(random_a());

    // Stage 0: estimate the minimum loss by unconstrained descent.
    double min_loss = std::numeric_limits<double>::infinity();
    MatrixXd min_loss_a = a0;
    for (const MatrixXd& s : starts) {
        Objective down{spec, 0.0, 0.0, true};
        const MatrixXd a = ascend(down, s, spec.opts.max_iters, spec.opts.tol);
        const double neg_l = down(a);
        if (std::isfinite(neg_l) && -neg_l < min_loss) {
            min_loss = -neg_l;
            min_loss_a = a;
        }
    }
    if (min_loss > spec.theta)
        throw Error(errc::no_feasible_point,
                    "loss minimizer found (" + std::to_string(min_loss) +
                        ") exceeds theta " + std::to_string(spec.theta));

    const double feas_tol = spec.theta * (1.0 + 1e-6);
    KernelIntervalResult out;
    out.min_loss_found = min_loss;
    out.min_loss_a = min_loss_a;

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    auto consider = [&](const MatrixXd& a) {
        double loss, pred;
        try {
            loss = kernel_loss(a, spec.psi_d, spec.x, spec.y);
            if (loss > feas_tol) return;
            pred = kernel_predict(a, spec.psi_d, spec.x, spec.y, spec.x_new);
        } catch (const Error&) {
            return;
        }
        if (pred < lo) {
            lo = pred;
            out.witness_lower_a = a;
            out.loss_lower = loss;
        }
        if (pred > hi) {
            hi = pred;
            out.witness_upper_a = a;
            out.loss_upper = loss;
        }
    };
    consider(min_loss_a);

    for (double sign : {+1.0, -1.0}) {
        std::vector<MatrixXd> dir_starts = starts;
        dir_starts.push_back(min_loss_a);
        for (const MatrixXd& s : dir_starts) {
            MatrixXd a = s;
            double penalty = 1.0;
            for (int stage = 0; stage < spec.opts.penalty_stages; ++stage) {
                Objective obj{spec, sign, penalty, false};
                a = ascend(obj, a, spec.opts.max_iters, spec.opts.tol);
                consider(a);
                penalty *= spec.opts.penalty_growth;
            }
            // Infeasible endpoints are pulled back toward the minimizer.
            auto loss_or_inf = [&](const MatrixXd& m) {
                try {
                    return kernel_loss(m, spec.psi_d, spec.x, spec.y);
                } catch (const Error&) {
                    return std::numeric_limits<double>::infinity();
                }
            };
            if (loss_or_inf(a) > feas_tol) {
                double t = 1.0;
                for (int it = 0; it < 40; ++it) {
                    t *= 0.5;
                    const MatrixXd blend = min_loss_a + t * (a - min_loss_a);
                    if (loss_or_inf(blend) <= feas_tol) {
                        consider(blend);
                        break;
                    }
                }
            }
        }
    }

    const double base = kernel_predict(min_loss_a, spec.psi_d, spec.x, spec.y, spec.x_new);
    auto flatten_row_major = [p](const MatrixXd& m) {
        VectorXd v(p * p);
        for (Eigen::Index r = 0; r < p; ++r)
            for (Eigen::Index c = 0; c < p; ++c) v(r * p + c) = m(r, c);
        return v;
    };
    out.interval.lower = lo;
    out.interval.upper = hi;
    out.interval.theta = spec.theta;
    out.interval.stat_at_min_loss = base;
    out.interval.witness_layout = "A(row-major p*p)";
    out.interval.witness_lower = flatten_row_major(out.witness_lower_a);
    out.interval.witness_upper = flatten_row_major(out.witness_upper_a);
    return out;
}

} // namespace hackint
