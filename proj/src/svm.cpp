#include "hackint/svm.hpp"

#include "hackint/regression.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace hackint {

namespace {

constexpr double kSweepTol = 1e-8;   // objective improvement per sweep
constexpr int kStallSweeps = 3;
constexpr int kMaxSweeps = 100000;
constexpr double kGapTol = 1e-4;     // duality-gap certificate

void check_labels(const MatrixXd& x, const VectorXd& y) {
    if (y.size() != x.rows())
        throw Error(errc::dimension_mismatch, "label length does not match row count");
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) == 1.0) ++pos;
        else if (y(i) == -1.0) ++neg;
        else throw Error(errc::non_numeric_cell,
                         "label at row " + std::to_string(i) + " is not in {-1,+1}");
    }
    if (pos == 0 || neg == 0)
        throw Error(errc::single_class, "both classes must be present");
}

// Shared state for the pairwise ascent. The dual objective is
//   D(alpha, beta) = -||v||^2/(2 beta) + sum(alpha) - beta * theta,
// with v = -s*x_new + sum_i alpha_i y_i x_i. The baseline training dual is
// the beta = 1, x_new = 0, theta-term-free instance of the same form.
struct SmoState {
    const MatrixXd& x;
    const VectorXd& y;
    VectorXd alpha;
    VectorXd v;      // -s*x_new + sum alpha_i y_i x_i
    double beta = 1.0;
    double hi = 0.0; // box upper bound for each alpha_i

    void rebuild_v(const VectorXd& offset) {
        v = offset;
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            if (alpha(i) != 0.0) v += alpha(i) * y(i) * x.row(i).transpose();
    }

    // One pair move alpha_i += y_i*t, alpha_j -= y_j*t keeping sum(alpha.*y)
    // fixed; t maximizes the 1-d restriction of D, clipped to the box.
    bool pair_update(Eigen::Index i, Eigen::Index j) {
        if (i == j) return false;
        const VectorXd u = x.row(i).transpose() - x.row(j).transpose();
        const double uu = u.squaredNorm();
        double t_lo, t_hi;
        if (y(i) > 0) { t_lo = -alpha(i); t_hi = hi - alpha(i); }
        else          { t_lo = alpha(i) - hi; t_hi = alpha(i); }
        if (y(j) > 0) { t_lo = std::max(t_lo, alpha(j) - hi); t_hi = std::min(t_hi, alpha(j)); }
        else          { t_lo = std::max(t_lo, -alpha(j)); t_hi = std::min(t_hi, hi - alpha(j)); }
        if (t_lo >= t_hi) return false;

        double t;
        if (uu > 1e-300) {
            t = (beta * (y(i) - y(j)) - v.dot(u)) / uu;
        } else {
            const double slope = (y(i) - y(j)) - v.dot(u) / beta;
            if (std::fabs(slope) < 1e-15) return false;
            t = slope > 0 ? t_hi : t_lo;
        }
        t = std::clamp(t, t_lo, t_hi);
        if (std::fabs(t) < 1e-16) return false;
        alpha(i) += y(i) * t;
        alpha(j) -= y(j) * t;
        v += t * u;
        return true;
    }
};

double hinge_sum(const MatrixXd& x, const VectorXd& y, const VectorXd& lambda, double lambda0) {
    double s = 0.0;
    const VectorXd margins = x * lambda;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        s += std::max(0.0, 1.0 - y(i) * (margins(i) + lambda0));
    return s;
}

// Exact minimizer of the primal over lambda0 alone (convex piecewise linear
// plus a constant); ternary search on a safe bracket.
double best_lambda0(const MatrixXd& x, const VectorXd& y, const VectorXd& lambda) {
    const VectorXd margins = x * lambda;
    double b = 1.0 + margins.cwiseAbs().maxCoeff();
    double lo = -b - 1.0, hi = b + 1.0;
    auto g = [&](double l0) { return hinge_sum(x, y, lambda, l0); };
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (g(m1) <= g(m2)) hi = m2;
        else lo = m1;
    }
    return 0.5 * (lo + hi);
}

// Feasible lambda0 extremizing s*lambda0 subject to primal loss <= theta,
// for fixed lambda. Assumes some feasible lambda0 exists.
double extremal_lambda0(const MatrixXd& x, const VectorXd& y, double psi_d,
                        const VectorXd& lambda, double theta, int s) {
    auto loss_at = [&](double l0) {
        return 0.5 * lambda.squaredNorm() + psi_d * hinge_sum(x, y, lambda, l0);
    };
    const double center = best_lambda0(x, y, lambda);
    if (loss_at(center) > theta) return center; // caller rechecks feasibility

    // March outward (direction -s minimizes s*lambda0) to bracket the
    // feasibility boundary, then bisect.
    const double dir = s > 0 ? -1.0 : 1.0;
    double step = 1.0;
    double inside = center, outside = center + dir * step;
    int guard = 0;
    while (loss_at(outside) <= theta && guard++ < 200) {
        inside = outside;
        step *= 2.0;
        outside = center + dir * step;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (inside + outside);
        if (loss_at(mid) <= theta) inside = mid;
        else outside = mid;
    }
    return inside;
}

void all_pair_sweep(SmoState& st, std::vector<Eigen::Index>& perm, std::mt19937_64& rng) {
    const Eigen::Index n = st.alpha.size();
    if (n <= 80) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j) st.pair_update(i, j);
        return;
    }
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index k = 0; k < n; ++k)
        st.pair_update(perm[k], perm[(k + 1) % n]);
    // Maximal-violating pairing on the gradient for faster progress.
    VectorXd grad(n);
    const VectorXd xv = st.x * st.v;
    for (Eigen::Index i = 0; i < n; ++i) grad(i) = st.y(i) * (1.0 - st.y(i) * xv(i) / st.beta);
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return grad(a) > grad(b); });
    for (Eigen::Index k = 0; k < n / 2; ++k)
        st.pair_update(order[k], order[n - 1 - k]);
}

} // namespace

double svm_primal_loss(const MatrixXd& x, const VectorXd& y, double psi_d, const SvmModel& m) {
    return 0.5 * m.lambda.squaredNorm() + psi_d * hinge_sum(x, y, m.lambda, m.lambda0);
}

std::pair<SvmModel, double> svm_min_loss(const MatrixXd& x, const VectorXd& y,
                                         double psi_d, std::uint64_t seed) {
    check_labels(x, y);
    if (psi_d <= 0.0) throw Error(errc::invalid_config, "psi_d must be positive");
    const Eigen::Index n = x.rows();

    SmoState st{x, y, VectorXd::Zero(n), VectorXd::Zero(x.cols()), 1.0, psi_d};
    std::mt19937_64 rng(seed ^ 0xabcdef12345ULL);
    std::vector<Eigen::Index> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    auto objective = [&]() { return st.alpha.sum() - 0.5 * st.v.squaredNorm(); };
    double prev = objective();
    int stall = 0;
    for (int sweep = 0; sweep < kMaxSweeps && stall < kStallSweeps; ++sweep) {
        all_pair_sweep(st, perm, rng);
        st.rebuild_v(VectorXd::Zero(x.cols()));
        const double cur = objective();
        stall = (cur - prev < kSweepTol) ? stall + 1 : 0;
        prev = cur;
    }

    SvmModel model;
    model.lambda = st.v;
    bool interior = false;
    double l0_sum = 0.0;
    int l0_count = 0;
    const double band = 1e-7 * psi_d;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (st.alpha(i) > band && st.alpha(i) < psi_d - band) {
            l0_sum += y(i) - model.lambda.dot(x.row(i));
            ++l0_count;
            interior = true;
        }
    }
    model.lambda0 = interior ? l0_sum / l0_count : best_lambda0(x, y, model.lambda);
    // The exact 1-d minimum in lambda0 can only lower the loss.
    const double refined = best_lambda0(x, y, model.lambda);
    if (svm_primal_loss(x, y, psi_d, {model.lambda, refined}) <
        svm_primal_loss(x, y, psi_d, model))
        model.lambda0 = refined;
    return {model, svm_primal_loss(x, y, psi_d, model)};
}

namespace {

// For fixed beta the dual is a smooth box QP and the SMO pair sweeps
// converge; h(beta) = max_alpha D(alpha, beta) is then concave in beta
// (partial maximization of the jointly concave dual over a convex set), so
// an outer bracketing golden-section on beta recovers the joint optimum.
// The naive alternation with the closed-form update beta = sqrt(a/(2theta))
// jams at corners where alpha_i = beta*psi_d is active; the outer search
// uses that closed form only as its bracket seed.
struct DirectionSolver {
    const SvmProblem& pr;
    int s;
    VectorXd offset;
    double beta_floor;
    VectorXd alpha;   // warm-started across beta evaluations
    VectorXd v;
    std::vector<Eigen::Index> perm;
    std::mt19937_64 rng;

    DirectionSolver(const SvmProblem& problem, int dir, int n_carrier, std::uint64_t salt)
        : pr(problem),
          s(dir),
          offset(-static_cast<double>(dir) * problem.x_new),
          beta_floor((1.0 + 1e-12) / (problem.psi_d * n_carrier)),
          alpha(VectorXd::Zero(problem.x.rows())),
          v(VectorXd::Zero(problem.x.cols())),
          perm(problem.x.rows()),
          rng(problem.seed * 0x9e3779b97f4a7c15ULL + salt) {
        std::iota(perm.begin(), perm.end(), 0);
        for (Eigen::Index i = 0; i < pr.y.size(); ++i)
            if ((pr.y(i) > 0) == (s > 0)) alpha(i) = 1.0 / n_carrier;
    }

    void randomize_start() {
        std::uniform_real_distribution<double> u(0.0, 2.0 / alpha.size());
        for (Eigen::Index i = 0; i < alpha.size(); ++i) alpha(i) = u(rng);
        repair(1e300);
    }

    // Clip into [0, hi] and restore sum(alpha.*y) = s.
    void repair(double hi) {
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            alpha(i) = std::clamp(alpha(i), 0.0, hi);
        double excess = alpha.dot(pr.y) - s;
        for (int round = 0; round < 64 && std::fabs(excess) > 1e-14; ++round) {
            for (Eigen::Index i = 0; i < alpha.size() && std::fabs(excess) > 1e-14; ++i) {
                const double prev = alpha(i);
                alpha(i) = std::clamp(prev - pr.y(i) * excess, 0.0, hi);
                excess += pr.y(i) * (alpha(i) - prev);
            }
        }
    }

    // Inner box-QP solve at fixed beta; returns the dual objective.
    double solve_at(double beta) {
        repair(beta * pr.psi_d);
        SmoState st{pr.x, pr.y, alpha, v, beta, beta * pr.psi_d};
        st.rebuild_v(offset);
        auto objective = [&]() {
            return -st.v.squaredNorm() / (2.0 * beta) + st.alpha.sum() - beta * pr.theta;
        };
        double prev = objective();
        int stall = 0;
        for (int sweep = 0; sweep < kMaxSweeps && stall < kStallSweeps; ++sweep) {
            all_pair_sweep(st, perm, rng);
            const double cur = objective();
            stall = (cur - prev < kSweepTol * (1.0 + std::fabs(cur))) ? stall + 1 : 0;
            prev = cur;
        }
        st.rebuild_v(offset);
        alpha = st.alpha;
        v = st.v;
        return objective();
    }

    // Outer concave maximization over beta.
    double maximize(double& beta_out) {
        double beta0 = std::max(beta_floor * 2.0, 1e-6);
        {
            // Seed from the closed-form stationary point at the initial alpha.
            SmoState probe{pr.x, pr.y, alpha, v, beta0, beta0 * pr.psi_d};
            probe.rebuild_v(offset);
            const double a = probe.v.squaredNorm();
            if (pr.theta > 0.0 && a > 0.0)
                beta0 = std::max(beta_floor * 2.0, std::sqrt(a / (2.0 * pr.theta)));
        }
        // Geometric bracket around the peak of h(beta).
        double lo = std::max(beta_floor, beta0 / 64.0);
        double hi = beta0;
        double h_hi = solve_at(hi);
        for (int it = 0; it < 80; ++it) {
            const double next = hi * 2.0;
            const double h_next = solve_at(next);
            if (h_next <= h_hi) break;
            lo = hi;
            hi = next;
            h_hi = h_next;
        }
        double h_lo_probe = solve_at(std::max(beta_floor, lo / 2.0));
        double h_lo = solve_at(lo);
        for (int it = 0; it < 80 && lo > beta_floor * 1.5; ++it) {
            if (h_lo_probe <= h_lo) break;
            hi = std::min(hi, lo * 2.0);
            lo = std::max(beta_floor, lo / 2.0);
            h_lo = h_lo_probe;
            h_lo_probe = solve_at(std::max(beta_floor, lo / 2.0));
        }

        constexpr double kInvPhi = 0.6180339887498949;
        double a = lo, b = hi * 2.0;
        double c = b - kInvPhi * (b - a);
        double d = a + kInvPhi * (b - a);
        double fc = solve_at(c), fd = solve_at(d);
        for (int it = 0; it < 70; ++it) {
            if (fc > fd) {
                b = d; d = c; fd = fc;
                c = b - kInvPhi * (b - a);
                fc = solve_at(c);
            } else {
                a = c; c = d; fc = fd;
                d = a + kInvPhi * (b - a);
                fd = solve_at(d);
            }
            if (b - a < 1e-10 * (1.0 + a)) break;
        }
        beta_out = fc > fd ? c : d;
        return solve_at(beta_out);
    }
};

// Solve the dual for one direction s; returns the converged solution and a
// feasible witness attaining the reported bound.
SvmDualSolution solve_direction(const SvmProblem& pr, int s, const SvmModel& baseline,
                                double& witness_stat, bool& gap_ok) {
    const Eigen::Index n = pr.x.rows();
    const double psi = pr.psi_d;
    const double theta = pr.theta;
    int n_pos = 0, n_neg = 0;
    for (Eigen::Index i = 0; i < n; ++i) (pr.y(i) > 0 ? n_pos : n_neg)++;
    const int n_carrier = s > 0 ? n_pos : n_neg;

    SvmDualSolution best;
    best.objective = -std::numeric_limits<double>::infinity();
    double best_witness = s > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
    double best_dual = -std::numeric_limits<double>::infinity();
    VectorXd best_lambda;
    double best_l0 = 0.0;
    bool have_witness = false;

    constexpr int kRestarts = 3;
    for (int restart = 0; restart < kRestarts; ++restart) {
        DirectionSolver solver(pr, s, n_carrier, 7919 * (restart + 1) + (s > 0 ? 0 : 1));
        if (restart > 0) solver.randomize_start();
        double beta = 0.0;
        const double dual_obj = solver.maximize(beta);
        best_dual = std::max(best_dual, dual_obj);

        // Recover the hyperplane and a feasible witness for this restart.
        VectorXd lambda = solver.v / beta;
        bool interior = false;
        {
            const double hi = beta * psi;
            const double band = 1e-6 * hi;
            for (Eigen::Index i = 0; i < n; ++i)
                if (solver.alpha(i) > band && solver.alpha(i) < hi - band) interior = true;
        }
        const double tol_loss = theta * (1.0 + 1e-6) + 1e-12;
        // Feasibility-edge recovery of lambda0; at the dual optimum with an
        // interior support vector this coincides with the KKT rule
        // lambda0 = y_sv - lambda'x_sv.
        double l0 = extremal_lambda0(pr.x, pr.y, psi, lambda, theta, s);
        if (svm_primal_loss(pr.x, pr.y, psi, {lambda, l0}) > tol_loss) {
            // Shrink toward the baseline until feasible.
            double t = 1.0;
            VectorXd lam = lambda;
            double lz = l0;
            for (int it = 0; it < 60; ++it) {
                t *= 0.5;
                lam = baseline.lambda + t * (lambda - baseline.lambda);
                lz = extremal_lambda0(pr.x, pr.y, psi, lam, theta, s);
                if (svm_primal_loss(pr.x, pr.y, psi, {lam, lz}) <= tol_loss) break;
            }
            lambda = lam;
            l0 = lz;
        }
        const double stat = lambda.dot(pr.x_new) + l0;
        const bool better = s > 0 ? stat < best_witness : stat > best_witness;
        if (!have_witness || better) {
            have_witness = true;
            best_witness = stat;
            best.alpha = solver.alpha;
            best.beta = beta;
            best.objective = dual_obj;
            best_lambda = lambda;
            best_l0 = l0;
            best.interior_sv_found = interior;
        }
    }

    best.s = s;
    best.lambda = best_lambda;
    best.lambda0 = best_l0;
    best.primal_loss = svm_primal_loss(pr.x, pr.y, pr.psi_d, {best_lambda, best_l0});
    witness_stat = best_witness;

    // Weak duality: best_dual <= s * (optimal stat) <= s * witness stat.
    const double gap = static_cast<double>(s) * best_witness - best_dual;
    gap_ok = gap <= kGapTol * (1.0 + std::fabs(best_witness));
    return best;
}

} // namespace

SvmIntervalResult svm_hacking_interval(const SvmProblem& problem) {
    check_labels(problem.x, problem.y);
    if (problem.x_new.size() != problem.x.cols())
        throw Error(errc::dimension_mismatch, "x_new length does not match feature count");

    auto [baseline, min_loss] = svm_min_loss(problem.x, problem.y, problem.psi_d, problem.seed);
    SvmProblem pr = problem;
    pr.theta = clamp_theta(problem.theta, min_loss);

    SvmIntervalResult out;
    out.min_loss = min_loss;
    out.baseline = baseline;

    double stat_lo = 0.0, stat_hi = 0.0;
    bool ok_lo = false, ok_hi = false;
    out.lower_solution = solve_direction(pr, +1, baseline, stat_lo, ok_lo);
    out.upper_solution = solve_direction(pr, -1, baseline, stat_hi, ok_hi);

    const double base_stat = baseline.decision(problem.x_new);
    // The baseline model is always feasible, so the interval at least
    // brackets its decision value.
    stat_lo = std::min(stat_lo, base_stat);
    stat_hi = std::max(stat_hi, base_stat);

    out.interval.theta = pr.theta;
    out.interval.stat_at_min_loss = base_stat;
    out.interval.lower = stat_lo;
    out.interval.upper = stat_hi;
    out.interval.witness_layout = "lambda+lambda0";
    VectorXd wl(problem.x.cols() + 1), wu(problem.x.cols() + 1);
    wl << out.lower_solution.lambda, out.lower_solution.lambda0;
    wu << out.upper_solution.lambda, out.upper_solution.lambda0;
    out.interval.witness_lower = wl;
    out.interval.witness_upper = wu;

    out.gap_lower = stat_lo - out.lower_solution.objective;
    out.gap_upper = -stat_hi - out.upper_solution.objective;
    out.degraded = !(ok_lo && ok_hi);
    return out;
}

const char* classification_name(SvmClassification c) {
    switch (c) {
        case SvmClassification::all_negative: return "AllNegative";
        case SvmClassification::straddles: return "Straddles";
        case SvmClassification::all_positive: return "AllPositive";
    }
    return "?";
}

SvmBatchResult svm_interval_batch(const MatrixXd& x, const VectorXd& y, double psi_d,
                                  double rel_tolerance, const MatrixXd& queries,
                                  std::uint64_t seed, int threads) {
    if (rel_tolerance < 0.0)
        throw Error(errc::invalid_config, "relative tolerance must be nonnegative");
    if (queries.cols() != x.cols())
        throw Error(errc::dimension_mismatch, "query columns do not match feature count");

    auto [baseline, min_loss] = svm_min_loss(x, y, psi_d, seed);
    const double theta = (1.0 + rel_tolerance) * min_loss;

    SvmBatchResult out;
    out.min_loss = min_loss;
    out.theta = theta;
    out.baseline = baseline;
    out.intervals.resize(queries.rows());
    out.classes.resize(queries.rows());

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min<int>(threads, static_cast<int>(queries.rows())));

    std::atomic<Eigen::Index> next{0};
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const Eigen::Index row = next.fetch_add(1);
            if (row >= queries.rows()) return;
            try {
                SvmProblem pr{x, y, psi_d, queries.row(row).transpose(), theta,
                              seed + 1000003ULL * row};
                out.intervals[row] = svm_hacking_interval(pr);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::make_exception_ptr(
                        Error(e.code(), "query row " + std::to_string(row) + ": " + e.what()));
                return;
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
            const auto& iv = out.intervals[row].interval;
            out.classes[row] = iv.upper < 0.0   ? SvmClassification::all_negative
                               : iv.lower > 0.0 ? SvmClassification::all_positive
                                                : SvmClassification::straddles;
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

} // namespace hackint
