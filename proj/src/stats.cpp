#include "hackint/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hackint/errors.hpp"

namespace hackint::stats {

namespace {

// Continued-fraction evaluation for the incomplete beta (Lentz's method).
double beta_cf(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= max_iter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return h;
}

double gamma_series(double a, double x) {
    constexpr int max_iter = 1000;
    constexpr double eps = 1e-16;
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < max_iter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * eps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    constexpr int max_iter = 1000;
    constexpr double eps = 1e-16;
    constexpr double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= max_iter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::fabs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= eps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Bisection for a monotone-increasing cdf, run down to bracket width 1e-12
// relative, then a few Newton-free midpoint refinements.
template <typename Cdf>
double invert_cdf(Cdf cdf, double p, double lo, double hi) {
    while (cdf(hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return hi;
    }
    while (cdf(lo) > p) {
        hi = lo;
        lo = lo > 0 ? lo * 0.5 : lo * 2.0 - 1.0;
        if (lo < -1e300) return lo;
    }
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * (1.0 + std::fabs(lo))) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double incomplete_beta(double a, double b, double x) {
    if (x < 0.0 || x > 1.0) throw Error(errc::invalid_config, "incomplete_beta x outside [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b)
                          + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double incomplete_gamma_lower(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error(errc::invalid_config, "incomplete_gamma arguments out of range");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_cf(a, x);
}

double student_t_cdf(double t, double df) {
    if (df <= 0.0) throw Error(errc::dof_nonpositive, "t distribution needs df > 0");
    const double p_tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0.0 ? 1.0 - p_tail : p_tail;
}

double chi_square_cdf(double x, double df) {
    if (df <= 0.0) throw Error(errc::dof_nonpositive, "chi-square needs df > 0");
    if (x <= 0.0) return 0.0;
    return incomplete_gamma_lower(0.5 * df, 0.5 * x);
}

double student_t_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw Error(errc::invalid_alpha, "quantile level must lie in (0,1)");
    if (p == 0.5) return 0.0;
    return invert_cdf([df](double t) { return student_t_cdf(t, df); }, p,
                      -1.0, 1.0);
}

double chi_square_quantile(double p, double df) {
    if (!(p > 0.0 && p < 1.0)) throw Error(errc::invalid_alpha, "quantile level must lie in (0,1)");
    return invert_cdf([df](double x) { return chi_square_cdf(x, df); }, p,
                      0.0, df + 1.0);
}

double chi_mean(double k) {
    if (k <= 0.0) throw Error(errc::dof_nonpositive, "chi mean needs k > 0");
    return std::exp(0.5 * std::log(2.0) + std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5 * k));
}

} // namespace hackint::stats
