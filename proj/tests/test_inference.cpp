#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hackint/inference.hpp"
#include "hackint/stats.hpp"

using namespace hackint;

namespace {

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
        d.y(i) = d.x(i, 0) + 0.8 * w(i) + gauss(rng);
    }
    w(0) = 0.0;
    w(1) = 1.0;
    d.w = w;
    return d;
}

// Textbook t-interval coded from scratch for the equivalence check.
std::pair<double, double> classic_t_interval(const OlsFit& fit, double alpha) {
    const int dof = static_cast<int>(fit.n - fit.p) - 1;
    const double t = stats::student_t_quantile(1.0 - alpha / 2.0, dof);
    const double half = t * std::sqrt(fit.sse / dof) * std::sqrt(*fit.v_tt);
    return {*fit.beta0_ls - half, *fit.beta0_ls + half};
}

} // namespace

TEST_CASE("resolve_theta relative") {
    const double theta = resolve_theta(LossBudget::relative_to_min(0.10), 10.0);
    CHECK(theta == doctest::Approx(11.0));
}

TEST_CASE("resolve_theta sign flip closed form") {
    OlsFit fit;
    fit.beta0_ls = -1.0;
    fit.v_tt = 0.25;
    fit.sse = 10.0;
    fit.n = 50;
    fit.p = 3;
    fit.beta_ls = VectorXd::Zero(3);
    fit.gamma_ls = VectorXd::Zero(3);
    const double theta = resolve_theta(LossBudget::sign_flip(), fit.sse, &fit);
    CHECK(theta == doctest::Approx(14.0));

    // The ATE interval at that budget touches zero.
    const auto iv = ate_interval(fit, theta);
    CHECK(std::min(std::fabs(iv.lower), std::fabs(iv.upper)) < 1e-8);
}

TEST_CASE("resolve_theta classical alpha") {
    OlsFit fit;
    fit.sse = 10.0;
    fit.n = 104;
    fit.p = 3; // dof = 100
    const double theta = resolve_theta(LossBudget::classical_alpha(0.05), fit.sse, &fit);
    CHECK(theta == doctest::Approx(10.3936).epsilon(1e-4));
}

TEST_CASE("resolve_theta monotonicity") {
    OlsFit fit;
    fit.sse = 5.0;
    fit.n = 40;
    fit.p = 2;
    double prev = resolve_theta(LossBudget::relative_to_min(0.0), fit.sse);
    for (double r : {0.05, 0.2, 0.5, 1.0}) {
        const double cur = resolve_theta(LossBudget::relative_to_min(r), fit.sse);
        CHECK(cur > prev);
        prev = cur;
    }
    prev = resolve_theta(LossBudget::classical_alpha(0.5), fit.sse, &fit);
    for (double a : {0.2, 0.1, 0.05, 0.01}) {
        const double cur = resolve_theta(LossBudget::classical_alpha(a), fit.sse, &fit);
        CHECK(cur > prev);
        prev = cur;
    }
}

TEST_CASE("resolve_theta error paths") {
    CHECK_THROWS_AS(resolve_theta(LossBudget::classical_alpha(0.05), 1.0, nullptr), Error);
    OlsFit tiny;
    tiny.sse = 1.0;
    tiny.n = 3;
    tiny.p = 2; // dof = 0
    CHECK_THROWS_AS(resolve_theta(LossBudget::classical_alpha(0.05), 1.0, &tiny), Error);
    CHECK_THROWS_AS(LossBudget::classical_alpha(1.0), Error);
    CHECK_THROWS_AS(LossBudget::relative_to_min(-0.1), Error);
}

TEST_CASE("classical equivalence: ATE") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto d = random_treatment_dataset(40, 3, seed);
        const auto fit = fit_ols(d, true);
        for (double alpha : {0.01, 0.05, 0.2}) {
            const auto rep = classical_ci_equivalence_check(fit, alpha, CiKind::ate);
            CHECK(rep.max_abs_gap < 1e-9);
            const auto [lo, hi] = classic_t_interval(fit, alpha);
            CHECK(rep.classical_lower == doctest::Approx(lo).epsilon(1e-12));
            CHECK(rep.classical_upper == doctest::Approx(hi).epsilon(1e-12));
        }
    }
}

TEST_CASE("classical equivalence: prediction, alpha near 1 collapses") {
    const auto d = random_treatment_dataset(50, 3, 17);
    Dataset plain;
    plain.x = d.x;
    plain.y = d.y;
    const auto fit = fit_ols(plain, false);
    const VectorXd x_new = (VectorXd(3) << 0.2, -0.7, 1.1).finished();

    const auto rep = classical_ci_equivalence_check(fit, 0.01, CiKind::prediction, x_new);
    CHECK(rep.max_abs_gap < 1e-9);

    const auto nearly_one = classical_ci_equivalence_check(fit, 0.999999, CiKind::prediction, x_new);
    CHECK(nearly_one.hacking.width() < 1e-4);
    CHECK(nearly_one.max_abs_gap < 1e-9);
}

TEST_CASE("ate_bound_variance closed forms") {
    CHECK(ate_bound_variance(2.0, 0.5, 0.0, 30, 4) == doctest::Approx(1.0));
    // n - p - 1 = 1: mu^2 = 2/pi.
    const double v = ate_bound_variance(1.0, 1.0, 1.0, 6, 4);
    CHECK(v == doctest::Approx(1.0 + (1.0 - 2.0 / M_PI)).epsilon(1e-10));
    CHECK(ate_bound_variance(1.0, 1.0, 0.5, 6, 4) ==
          doctest::Approx(1.0 + 0.5 * (1.0 - 2.0 / M_PI)).epsilon(1e-10));
    CHECK_THROWS_AS(ate_bound_variance(1.0, 1.0, 0.1, 4, 3), Error);
}

TEST_CASE("profile threshold") {
    // alpha -> 1 sends the chi-square quantile to 0.
    ProfileSpec spec{12.5, 1, 0.999999};
    CHECK(profile_theta(spec) == doctest::Approx(12.5).epsilon(1e-4));
    CHECK(loss_threshold_from_profile(profile_theta(spec)) == doctest::Approx(-12.5).epsilon(1e-4));

    spec.alpha = 0.05;
    CHECK(profile_theta(spec) == doctest::Approx(12.5 - 1.9207).epsilon(1e-4));

    spec.alpha = 2.0;
    CHECK_THROWS_AS(profile_theta(spec), Error);
}

TEST_CASE("generalization bound") {
    GenBoundInput inp{50, 100, 0.05, 0.0, 0.0, 0.0, 0.0};
    const double base = generalization_bound(inp);
    CHECK(base == doctest::Approx(2.08579).epsilon(1e-4));

    // Unit slope in each theta term.
    GenBoundInput shifted = inp;
    shifted.theta1 = shifted.theta2 = shifted.theta3 = shifted.theta4 = 0.25;
    CHECK(generalization_bound(shifted) == doctest::Approx(base + 1.0).epsilon(1e-12));
    for (int which = 0; which < 4; ++which) {
        GenBoundInput one = inp;
        (which == 0   ? one.theta1
         : which == 1 ? one.theta2
         : which == 2 ? one.theta3
                      : one.theta4) = 0.7;
        CHECK(generalization_bound(one) == doctest::Approx(base + 0.7).epsilon(1e-12));
    }

    GenBoundInput bad{2, 100, 0.05, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(generalization_bound(bad), Error);
    try {
        generalization_bound(bad);
    } catch (const Error& e) {
        CHECK(e.code() == errc::negative_sqrt_argument);
    }
    // The alternate log form stays positive there.
    CHECK(generalization_bound(bad, VcLogForm::n_over_h) > 0.0);
}

TEST_CASE("profile bridge equals the closed-form tethered interval") {
    // Gaussian-linear model with known sigma: the tethered interval at
    // theta = SSE + sigma^2 chi2_{1,1-alpha} must match the profile
    // interval computed by direct profiling and root-finding.
    const double sigma = 1.0, alpha = 0.05;
    Dataset d = random_treatment_dataset(60, 3, 99);

    const auto fit = fit_ols(d, true);
    const double chi = stats::chi_square_quantile(1.0 - alpha, 1);
    const double theta = fit.sse + sigma * sigma * chi;
    const auto iv = ate_interval(fit, theta);

    // Independent profiling: for fixed lambda, xi minimizes the residual;
    // bisect log Lp(lambda) = log Lp(max) - chi/2 on each side.
    auto rss = [&](double lambda) {
        Dataset tmp;
        tmp.x = d.x;
        tmp.y = d.y - lambda * (*d.w);
        const auto f = fit_ols(tmp, false);
        return f.sse;
    };
    auto loglp = [&](double lambda) { return -rss(lambda) / (2.0 * sigma * sigma); };
    const double lam_hat = *fit.beta0_ls;
    const double target = loglp(lam_hat) - 0.5 * chi;
    auto solve_side = [&](double direction) {
        double lo = lam_hat, hi = lam_hat + direction;
        while (loglp(hi) > target) hi += direction;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (loglp(mid) > target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double p_hi = solve_side(1.0);
    const double p_lo = solve_side(-1.0);
    CHECK(iv.upper == doctest::Approx(p_hi).epsilon(1e-9));
    CHECK(iv.lower == doctest::Approx(p_lo).epsilon(1e-9));
}
