#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hackint/regression.hpp"

using namespace hackint;

namespace {

// Independent normal-equation oracle: plain Gaussian elimination with
// partial pivoting on X'X b = X'y.
VectorXd solve_normal_equations(const MatrixXd& x, const VectorXd& y) {
    const int p = static_cast<int>(x.cols());
    std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0.0));
    for (int r = 0; r < p; ++r) {
        for (int c = 0; c < p; ++c)
            for (int i = 0; i < x.rows(); ++i) a[r][c] += x(i, r) * x(i, c);
        for (int i = 0; i < x.rows(); ++i) a[r][p] += x(i, r) * y(i);
    }
    for (int col = 0; col < p; ++col) {
        int piv = col;
        for (int r = col + 1; r < p; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < p; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (int c = col; c <= p; ++c) a[r][c] -= f * a[col][c];
        }
    }
    VectorXd b(p);
    for (int r = 0; r < p; ++r) b(r) = a[r][p] / a[r][r];
    return b;
}

Dataset random_treatment_dataset(int n, int p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    Dataset d;
    d.x.resize(n, p);
    d.y.resize(n);
    VectorXd w(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) d.x(i, j) = gauss(rng);
        w(i) = coin(rng) ? 1.0 : 0.0;
        d.y(i) = 0.7 * d.x(i, 0) - 0.4 * (p > 1 ? d.x(i, 1) : 0.0) + 1.3 * w(i) + gauss(rng);
    }
    // Guarantee both arms are populated.
    w(0) = 0.0;
    w(1) = 1.0;
    d.w = w;
    return d;
}

double witness_loss_ate(const Dataset& d, const VectorXd& witness) {
    return ols_loss(d, witness, true);
}

} // namespace

TEST_CASE("fit_ols two-point mean") {
    Dataset d;
    d.x = MatrixXd::Ones(2, 1);
    d.y = (VectorXd(2) << 3.0, 5.0).finished();
    const auto fit = fit_ols(d, false);
    CHECK(fit.beta_ls(0) == doctest::Approx(4.0));
    CHECK(fit.sse == doctest::Approx(2.0));
}

TEST_CASE("fit_ols exact interpolation has zero loss") {
    Dataset d;
    d.x.resize(4, 2);
    d.x << 1, 2, 3, 4, 5, 6, 7, 9;
    d.y = d.x * (VectorXd(2) << 2.0, -1.0).finished();
    const auto fit = fit_ols(d, false);
    CHECK(fit.sse == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.beta_ls(0) == doctest::Approx(2.0));
    CHECK(fit.beta_ls(1) == doctest::Approx(-1.0));
}

TEST_CASE("fit_ols matches the normal-equation oracle") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset d;
    d.x.resize(20, 3);
    d.y.resize(20);
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 3; ++j) d.x(i, j) = gauss(rng);
        d.y(i) = gauss(rng);
    }
    const auto fit = fit_ols(d, false);
    const VectorXd oracle = solve_normal_equations(d.x, d.y);
    for (int j = 0; j < 3; ++j)
        CHECK(fit.beta_ls(j) == doctest::Approx(oracle(j)).epsilon(1e-9));
}

TEST_CASE("fit_ols error paths") {
    Dataset d;
    d.x.resize(3, 2);
    d.x << 1, 2, 2, 4, 3, 6; // rank 1
    d.y = (VectorXd(3) << 1.0, 2.0, 3.0).finished();
    CHECK_THROWS_AS(fit_ols(d, false), Error);
    try {
        fit_ols(d, false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::singular_gram);
    }

    Dataset short_d;
    short_d.x = MatrixXd::Ones(2, 2);
    short_d.x(1, 1) = 3.0;
    short_d.y = (VectorXd(2) << 1.0, 2.0).finished();
    CHECK_THROWS_AS(fit_ols(short_d, false), Error); // n <= p

    Dataset no_w;
    no_w.x = MatrixXd::Ones(5, 1);
    no_w.y = VectorXd::Zero(5);
    CHECK_THROWS_AS(fit_ols(no_w, true), Error); // missing treatment
}

TEST_CASE("ate_interval at theta = sse degenerates") {
    const auto d = random_treatment_dataset(25, 2, 3);
    const auto fit = fit_ols(d, true);
    const auto iv = ate_interval(fit, fit.sse);
    CHECK(iv.lower == doctest::Approx(*fit.beta0_ls));
    CHECK(iv.upper == doctest::Approx(*fit.beta0_ls));
}

TEST_CASE("ate_interval width law and witnesses") {
    const auto d = random_treatment_dataset(30, 3, 5);
    const auto fit = fit_ols(d, true);
    const double theta = 1.25 * fit.sse;
    const auto iv = ate_interval(fit, theta);

    const double expected_width = 2.0 * std::sqrt(*fit.v_tt) * std::sqrt(theta - fit.sse);
    CHECK(iv.width() == doctest::Approx(expected_width).epsilon(1e-12));

    // Doubling theta - sse scales the width by sqrt(2).
    const auto iv2 = ate_interval(fit, fit.sse + 2.0 * (theta - fit.sse));
    CHECK(iv2.width() == doctest::Approx(std::sqrt(2.0) * iv.width()).epsilon(1e-10));

    // Witnesses attain the loss budget and the bound.
    for (const auto* w : {&iv.witness_lower, &iv.witness_upper}) {
        const double loss = witness_loss_ate(d, *w);
        CHECK(loss == doctest::Approx(theta).epsilon(1e-8));
        CHECK(loss <= theta * (1.0 + 1e-8));
    }
    CHECK(iv.witness_lower(fit.p) == doctest::Approx(iv.lower).epsilon(1e-12));
    CHECK(iv.witness_upper(fit.p) == doctest::Approx(iv.upper).epsilon(1e-12));
}

TEST_CASE("ate_interval nesting in theta") {
    const auto d = random_treatment_dataset(24, 2, 7);
    const auto fit = fit_ols(d, true);
    const auto narrow = ate_interval(fit, 1.1 * fit.sse);
    const auto wide = ate_interval(fit, 1.3 * fit.sse);
    CHECK(wide.lower <= narrow.lower);
    CHECK(wide.upper >= narrow.upper);
}

TEST_CASE("ate_interval outcome equivariance under y -> a*y + X*c") {
    const auto d = random_treatment_dataset(28, 3, 9);
    const auto fit = fit_ols(d, true);
    const double r = 0.2;
    const auto iv = ate_interval(fit, (1.0 + r) * fit.sse);

    Dataset d2 = d;
    const double a = 2.5;
    const VectorXd c = (VectorXd(3) << 0.3, -1.0, 2.0).finished();
    d2.y = a * d.y + d.x * c;
    const auto fit2 = fit_ols(d2, true);
    const auto iv2 = ate_interval(fit2, (1.0 + r) * fit2.sse);

    CHECK(iv2.lower == doctest::Approx(a * iv.lower).epsilon(1e-9));
    CHECK(iv2.upper == doctest::Approx(a * iv.upper).epsilon(1e-9));
}

TEST_CASE("ate_interval theta below min loss") {
    const auto d = random_treatment_dataset(20, 2, 13);
    const auto fit = fit_ols(d, true);
    CHECK_THROWS_AS(ate_interval(fit, 0.5 * fit.sse), Error);
    // Tiny numerical undershoot is clamped.
    const auto iv = ate_interval(fit, fit.sse * (1.0 - 1e-14));
    CHECK(iv.lower == doctest::Approx(*fit.beta0_ls));
}

TEST_CASE("prediction_interval constant-model closed form") {
    Dataset d;
    d.x = MatrixXd::Ones(2, 1);
    d.y = (VectorXd(2) << 0.0, 2.0).finished();
    const auto fit = fit_ols(d, false);
    // sse = 2, theta = 4: interval = ybar +- sqrt((theta-sse)/n) = 1 +- 1.
    const auto iv = prediction_interval(fit, VectorXd::Ones(1), 4.0);
    CHECK(iv.lower == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(iv.upper == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(iv.stat_at_min_loss == doctest::Approx(1.0));
}

TEST_CASE("prediction_interval witnesses replay") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Dataset d;
    d.x.resize(25, 3);
    d.y.resize(25);
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 3; ++j) d.x(i, j) = gauss(rng);
        d.y(i) = d.x(i, 0) - d.x(i, 2) + 0.5 * gauss(rng);
    }
    const auto fit = fit_ols(d, false);
    const VectorXd x_new = (VectorXd(3) << 0.5, -1.0, 2.0).finished();
    const double theta = 1.3 * fit.sse;
    const auto iv = prediction_interval(fit, x_new, theta);

    CHECK(x_new.dot(iv.witness_lower) == doctest::Approx(iv.lower).epsilon(1e-10));
    CHECK(x_new.dot(iv.witness_upper) == doctest::Approx(iv.upper).epsilon(1e-10));
    CHECK(ols_loss(d, iv.witness_lower, false) == doctest::Approx(theta).epsilon(1e-8));
    CHECK(ols_loss(d, iv.witness_upper, false) == doctest::Approx(theta).epsilon(1e-8));
    CHECK(iv.lower <= iv.stat_at_min_loss);
    CHECK(iv.upper >= iv.stat_at_min_loss);
}

TEST_CASE("ite_interval decomposes into two prediction intervals") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto make = [&](int n) {
        Dataset d;
        d.x.resize(n, 2);
        d.y.resize(n);
        for (int i = 0; i < n; ++i) {
            d.x(i, 0) = gauss(rng);
            d.x(i, 1) = gauss(rng);
            d.y(i) = d.x(i, 0) + 0.3 * gauss(rng);
        }
        return d;
    };
    const auto treated = make(30), control = make(30);
    const auto fit_t = fit_ols(treated, false);
    const auto fit_c = fit_ols(control, false);
    const VectorXd x_new = (VectorXd(2) << 1.0, -0.5).finished();
    const double theta_t = 1.15 * fit_t.sse, theta_c = 1.25 * fit_c.sse;

    const auto iv = ite_interval(treated, control, x_new, theta_t, theta_c);
    const auto pt = prediction_interval(fit_t, x_new, theta_t);
    const auto pc = prediction_interval(fit_c, x_new, theta_c);
    CHECK(iv.upper == doctest::Approx(pt.upper - pc.lower).epsilon(1e-9));
    CHECK(iv.lower == doctest::Approx(pt.lower - pc.upper).epsilon(1e-9));

    // theta at the minimum loss on both arms collapses to the point estimate.
    const auto point = ite_interval(treated, control, x_new, fit_t.sse, fit_c.sse);
    CHECK(point.lower == doctest::Approx(point.upper));
    CHECK(point.lower ==
          doctest::Approx(x_new.dot(fit_t.beta_ls) - x_new.dot(fit_c.beta_ls)).epsilon(1e-10));
}

TEST_CASE("ite_interval labels the failing arm") {
    Dataset good;
    good.x = MatrixXd::Random(10, 2);
    good.y = VectorXd::Random(10);
    Dataset bad;
    bad.x.resize(4, 2);
    bad.x << 1, 2, 2, 4, 3, 6, 4, 8; // rank deficient
    bad.y = VectorXd::Random(4);
    try {
        ite_interval(bad, good, VectorXd::Zero(2), 1.0, 1.0);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("treated arm") != std::string::npos);
    }
}
