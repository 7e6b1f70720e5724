#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hackint/oracle.hpp"
#include "hackint/svm.hpp"

using namespace hackint;

namespace {

// Independent training oracle: projected subgradient descent on the primal
// with a decaying step, tracking the best iterate.
double subgradient_svm_objective(const MatrixXd& x, const VectorXd& y, double psi_d,
                                 int iters) {
    const Eigen::Index p = x.cols(), n = x.rows();
    VectorXd lambda = VectorXd::Zero(p);
    double lambda0 = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= iters; ++it) {
        VectorXd g = lambda;
        double g0 = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double margin = y(i) * (lambda.dot(x.row(i)) + lambda0);
            if (margin < 1.0) {
                g -= psi_d * y(i) * x.row(i).transpose();
                g0 -= psi_d * y(i);
            }
        }
        const double step = 1.0 / std::sqrt(static_cast<double>(it));
        lambda -= step * g / (1.0 + g.norm());
        lambda0 -= step * g0 / (1.0 + std::fabs(g0));
        best = std::min(best, svm_primal_loss(x, y, psi_d, {lambda, lambda0}));
    }
    return best;
}

MatrixXd two_blob_data(int n_per_class, std::uint64_t seed, VectorXd& labels) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 0.7);
    MatrixXd x(2 * n_per_class, 2);
    labels.resize(2 * n_per_class);
    for (int i = 0; i < n_per_class; ++i) {
        x(i, 0) = -1.2 + noise(rng);
        x(i, 1) = noise(rng);
        labels(i) = -1.0;
        x(n_per_class + i, 0) = 1.2 + noise(rng);
        x(n_per_class + i, 1) = noise(rng);
        labels(n_per_class + i) = 1.0;
    }
    return x;
}

// Primal brute-force interval over (lambda, lambda0) via the generic oracle.
std::pair<double, double> primal_oracle_interval(const MatrixXd& x, const VectorXd& y,
                                                 double psi_d, const VectorXd& x_new,
                                                 double theta, std::uint64_t seed) {
    auto loss = [&](const VectorXd& params) {
        const VectorXd lambda = params.head(x.cols());
        return svm_primal_loss(x, y, psi_d, {lambda, params(x.cols())});
    };
    auto stat = [&](const VectorXd& params) {
        return params.head(x.cols()).dot(x_new) + params(x.cols());
    };
    oracle::OracleBudget budget;
    budget.samples = 200000;
    budget.seed = seed;
    const double lam_bound = std::sqrt(2.0 * theta) + 0.5;
    double margin_bound = 1.0 + theta / psi_d;
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        margin_bound = std::max(margin_bound, 1.0 + lam_bound * x.row(i).norm());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        budget.box.emplace_back(-lam_bound, lam_bound);
    budget.box.emplace_back(-margin_bound, margin_bound);
    const auto res = oracle::brute_force_interval(loss, stat, theta, budget);
    return {res.lower, res.upper};
}

} // namespace

TEST_CASE("svm_min_loss separable two-point closed form") {
    MatrixXd x(2, 1);
    x << -1.0, 1.0;
    VectorXd y(2);
    y << -1.0, 1.0;
    const auto [model, loss] = svm_min_loss(x, y, 1000.0, 1);
    CHECK(loss == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(model.lambda(0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(model.lambda0 == doctest::Approx(0.0).epsilon(1e-2));
}

TEST_CASE("svm_min_loss label-flip symmetry") {
    VectorXd y;
    const MatrixXd x = two_blob_data(8, 3, y);
    const auto [m1, l1] = svm_min_loss(x, y, 1.0, 5);
    const auto [m2, l2] = svm_min_loss(x, VectorXd(-y), 1.0, 5);
    CHECK(l1 == doctest::Approx(l2).epsilon(1e-6));
    CHECK(m1.lambda(0) == doctest::Approx(-m2.lambda(0)).epsilon(1e-4));
}

TEST_CASE("svm_min_loss matches the subgradient oracle") {
    VectorXd y;
    const MatrixXd x = two_blob_data(20, 11, y);
    const auto [model, loss] = svm_min_loss(x, y, 1.0, 7);
    const double oracle_loss = subgradient_svm_objective(x, y, 1.0, 200000);
    // The oracle only upper-bounds the optimum; our solve must not exceed it
    // and must sit within its tolerance band.
    CHECK(loss <= oracle_loss + 1e-6);
    CHECK(loss == doctest::Approx(oracle_loss).epsilon(1e-4));
}

TEST_CASE("svm_min_loss rejects single-class data") {
    MatrixXd x = MatrixXd::Random(6, 2);
    VectorXd y = VectorXd::Ones(6);
    CHECK_THROWS_AS(svm_min_loss(x, y, 1.0, 0), Error);
}

TEST_CASE("tight theta collapses to the baseline decision value") {
    VectorXd y;
    const MatrixXd x = two_blob_data(7, 21, y);
    const auto [model, min_loss] = svm_min_loss(x, y, 1.0, 2);
    SvmProblem pr{x, y, 1.0, (VectorXd(2) << 0.8, -0.2).finished(), min_loss + 1e-9, 2};
    const auto res = svm_hacking_interval(pr);
    const double base = model.decision(pr.x_new);
    CHECK(res.interval.lower == doctest::Approx(base).epsilon(1e-3));
    CHECK(res.interval.upper == doctest::Approx(base).epsilon(1e-3));
}

TEST_CASE("interval vs primal oracle, feasibility, antisymmetry") {
    for (std::uint64_t seed : {1, 2, 3}) {
        VectorXd y;
        const MatrixXd x = two_blob_data(6, 100 + seed, y);
        const auto [model, min_loss] = svm_min_loss(x, y, 1.0, seed);
        const VectorXd x_new = (VectorXd(2) << 1.0, 0.4).finished();
        const double theta = 1.1 * min_loss;

        SvmProblem pr{x, y, 1.0, x_new, theta, seed};
        const auto res = svm_hacking_interval(pr);

        // Baseline inside; witnesses feasible and reproducing the bounds.
        const double base = model.decision(x_new);
        CHECK(res.interval.lower <= base + 1e-9);
        CHECK(res.interval.upper >= base - 1e-9);
        for (const auto* sol : {&res.lower_solution, &res.upper_solution}) {
            CHECK(sol->primal_loss <= theta * (1.0 + 1e-6) + 1e-12);
            // Dual feasibility invariants.
            CHECK(sol->beta > 0.0);
            CHECK(std::fabs(sol->alpha.dot(y) - sol->s) < 1e-8);
            for (Eigen::Index i = 0; i < sol->alpha.size(); ++i) {
                CHECK(sol->alpha(i) >= -1e-12);
                CHECK(sol->alpha(i) <= sol->beta * pr.psi_d + 1e-8);
            }
            // Hyperplane recovery identity.
            VectorXd v = -static_cast<double>(sol->s) * x_new;
            for (Eigen::Index i = 0; i < sol->alpha.size(); ++i)
                v += sol->alpha(i) * y(i) * x.row(i).transpose();
            CHECK((sol->lambda - v / sol->beta).norm() < 1e-8 * (1.0 + v.norm()));
        }
        const double stat_lo =
            res.lower_solution.lambda.dot(x_new) + res.lower_solution.lambda0;
        const double stat_hi =
            res.upper_solution.lambda.dot(x_new) + res.upper_solution.lambda0;
        CHECK(stat_lo == doctest::Approx(res.interval.lower).epsilon(1e-8));
        CHECK(stat_hi == doctest::Approx(res.interval.upper).epsilon(1e-8));

        // Weak duality at convergence.
        CHECK(res.lower_solution.objective <= res.interval.lower + 1e-6);
        CHECK(res.gap_lower < 1e-4 * (1.0 + std::fabs(res.interval.lower)));
        CHECK(res.gap_upper < 1e-4 * (1.0 + std::fabs(res.interval.upper)));

        // Oracle interval contained; endpoints agree to 2e-2.
        const auto [olo, ohi] = primal_oracle_interval(x, y, 1.0, x_new, theta, seed);
        CHECK(res.interval.lower <= olo + 2e-2);
        CHECK(res.interval.upper >= ohi - 2e-2);
        CHECK(res.interval.lower == doctest::Approx(olo).epsilon(2e-2));
        CHECK(res.interval.upper == doctest::Approx(ohi).epsilon(2e-2));

        // Label-flip antisymmetry.
        SvmProblem flipped{x, VectorXd(-y), 1.0, x_new, theta, seed};
        const auto res_f = svm_hacking_interval(flipped);
        CHECK(res_f.lower_solution.alpha.size() == y.size());
        CHECK(res.interval.lower == doctest::Approx(-res_f.interval.upper).epsilon(1e-6));
        CHECK(res.interval.upper == doctest::Approx(-res_f.interval.lower).epsilon(1e-6));
    }
}

TEST_CASE("theta below the minimum loss is rejected") {
    VectorXd y;
    const MatrixXd x = two_blob_data(6, 9, y);
    const auto [model, min_loss] = svm_min_loss(x, y, 1.0, 9);
    SvmProblem pr{x, y, 1.0, VectorXd::Zero(2), 0.5 * min_loss, 9};
    CHECK_THROWS_AS(svm_hacking_interval(pr), Error);
}

TEST_CASE("nesting in theta") {
    VectorXd y;
    const MatrixXd x = two_blob_data(6, 33, y);
    const auto [model, min_loss] = svm_min_loss(x, y, 1.0, 4);
    const VectorXd x_new = (VectorXd(2) << 0.5, 0.1).finished();
    const auto narrow = svm_hacking_interval({x, y, 1.0, x_new, 1.05 * min_loss, 4});
    const auto wide = svm_hacking_interval({x, y, 1.0, x_new, 1.3 * min_loss, 4});
    CHECK(wide.interval.lower <= narrow.interval.lower + 1e-6);
    CHECK(wide.interval.upper >= narrow.interval.upper - 1e-6);
}

TEST_CASE("batch classification and determinism") {
    VectorXd y;
    const MatrixXd x = two_blob_data(10, 77, y);
    MatrixXd queries(3, 2);
    queries << 1.4, 0.0,   // deep in the +1 class
               -1.4, 0.0,  // deep in the -1 class
               0.0, 0.0;   // on the boundary
    const auto batch = svm_interval_batch(x, y, 1.0, 0.02, queries, 7, 2);
    REQUIRE(batch.intervals.size() == 3);
    CHECK(batch.classes[0] == SvmClassification::all_positive);
    CHECK(batch.classes[1] == SvmClassification::all_negative);
    CHECK(batch.classes[2] == SvmClassification::straddles);

    // rel_tolerance = 0 degenerates every interval to the baseline value.
    const auto tight = svm_interval_batch(x, y, 1.0, 0.0, queries, 7, 1);
    for (size_t i = 0; i < 3; ++i) {
        const double base = batch.baseline.decision(queries.row(i).transpose());
        CHECK(tight.intervals[i].interval.lower == doctest::Approx(base).epsilon(1e-3));
        CHECK(tight.intervals[i].interval.upper == doctest::Approx(base).epsilon(1e-3));
    }

    // Same seed, with or without the thread fan-out: identical intervals.
    const auto again = svm_interval_batch(x, y, 1.0, 0.02, queries, 7, 1);
    for (size_t i = 0; i < 3; ++i) {
        CHECK(batch.intervals[i].interval.lower == again.intervals[i].interval.lower);
        CHECK(batch.intervals[i].interval.upper == again.intervals[i].interval.upper);
    }
}
