#include "hackint/inference.hpp"

#include <cmath>

#include "hackint/stats.hpp"

namespace hackint {

LossBudget LossBudget::relative_to_min(double r) {
    if (r < 0.0) throw Error(errc::invalid_config, "relative tolerance must satisfy r >= 0");
    return {Policy::relative_to_min, r};
}

LossBudget LossBudget::classical_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw Error(errc::invalid_alpha, "alpha must lie strictly in (0,1)");
    return {Policy::classical_alpha, alpha};
}

namespace {

int dof_or_throw(const OlsFit& fit) {
    const int dof = static_cast<int>(fit.n - fit.p) - 1;
    if (dof < 1)
        throw Error(errc::dof_nonpositive, "need n - p - 1 >= 1");
    return dof;
}

} // namespace

double resolve_theta(const LossBudget& budget, double min_loss, const OlsFit* fit_context) {
    if (min_loss < 0.0) throw Error(errc::invalid_config, "minimum loss must be nonnegative");
    switch (budget.policy) {
        case LossBudget::Policy::absolute:
            return clamp_theta(budget.value, min_loss);
        case LossBudget::Policy::relative_to_min:
            if (budget.value < 0.0)
                throw Error(errc::invalid_config, "relative tolerance must satisfy r >= 0");
            return (1.0 + budget.value) * min_loss;
        case LossBudget::Policy::classical_alpha: {
            if (!fit_context)
                throw Error(errc::missing_fit_context, "classical-alpha policy needs a fit context");
            if (!(budget.value > 0.0 && budget.value < 1.0))
                throw Error(errc::invalid_alpha, "alpha must lie strictly in (0,1)");
            const int dof = dof_or_throw(*fit_context);
            const double t = stats::student_t_quantile(1.0 - 0.5 * budget.value, dof);
            return fit_context->sse * (1.0 + t * t / dof);
        }
        case LossBudget::Policy::sign_flip: {
            if (!fit_context)
                throw Error(errc::missing_fit_context, "sign-flip policy needs a fit context");
            if (!fit_context->has_treatment())
                throw Error(errc::missing_treatment, "sign-flip policy needs a treatment coefficient");
            dof_or_throw(*fit_context);
            const double b0 = *fit_context->beta0_ls;
            return b0 * b0 / *fit_context->v_tt + fit_context->sse;
        }
    }
    throw Error(errc::invalid_config, "unknown loss budget policy");
}

CiEquivalenceReport classical_ci_equivalence_check(const OlsFit& fit, double alpha,
                                                   CiKind kind,
                                                   const std::optional<VectorXd>& x_new) {
    const int dof = dof_or_throw(fit);
    const double t = stats::student_t_quantile(1.0 - 0.5 * alpha, dof);
    const double theta = fit.sse * (1.0 + t * t / dof);
    const double se_scale = t * std::sqrt(fit.sse / dof);

    CiEquivalenceReport rep;
    rep.theta = theta;
    if (kind == CiKind::ate) {
        rep.hacking = ate_interval(fit, theta);
        const double half = se_scale * std::sqrt(*fit.v_tt);
        rep.classical_lower = *fit.beta0_ls - half;
        rep.classical_upper = *fit.beta0_ls + half;
    } else {
        if (!x_new)
            throw Error(errc::invalid_config, "prediction equivalence check needs x_new");
        rep.hacking = prediction_interval(fit, *x_new, theta);
        const double quad = x_new->dot(fit.gram_inv * (*x_new));
        const double half = se_scale * std::sqrt(quad);
        const double base = x_new->dot(fit.beta_ls);
        rep.classical_lower = base - half;
        rep.classical_upper = base + half;
    }
    rep.max_abs_gap = std::max(std::fabs(rep.hacking.lower - rep.classical_lower),
                               std::fabs(rep.hacking.upper - rep.classical_upper));
    return rep;
}

double ate_bound_variance(double sigma2, double v_tt, double r, int n, int p) {
    if (sigma2 <= 0.0 || v_tt <= 0.0)
        throw Error(errc::invalid_config, "sigma2 and v_tt must be positive");
    if (r < 0.0) throw Error(errc::invalid_config, "r must be nonnegative");
    const int dof = n - p - 1;
    if (dof < 1) throw Error(errc::dof_nonpositive, "need n - p - 1 >= 1");
    const double mu = stats::chi_mean(dof);
    return sigma2 * v_tt * (1.0 + r * (dof - mu * mu));
}

double profile_theta(const ProfileSpec& spec) {
    if (spec.m < 1) throw Error(errc::invalid_config, "df difference m must be >= 1");
    if (!(spec.alpha > 0.0 && spec.alpha < 1.0))
        throw Error(errc::invalid_alpha, "alpha must lie strictly in (0,1)");
    const double q = stats::chi_square_quantile(1.0 - spec.alpha, spec.m);
    return spec.log_lp_max - 0.5 * q;
}

double loss_threshold_from_profile(double theta_p) { return -theta_p; }

double generalization_bound(const GenBoundInput& inp, VcLogForm form) {
    if (inp.h < 1 || inp.n < 1)
        throw Error(errc::invalid_config, "h and n must be positive");
    if (!(inp.delta > 0.0 && inp.delta < 1.0))
        throw Error(errc::invalid_config, "delta must lie strictly in (0,1)");
    for (double th : {inp.theta1, inp.theta2, inp.theta3, inp.theta4})
        if (!(th >= 0.0) || !std::isfinite(th))
            throw Error(errc::invalid_config, "theta terms must be finite and nonnegative");

    const double h = inp.h, n = inp.n;
    const double log_term = form == VcLogForm::h_over_n
                                ? std::log(2.0 * std::exp(1.0) * h / n)
                                : std::log(2.0 * std::exp(1.0) * n / h);
    const double arg = h * log_term + std::log(4.0 / inp.delta);
    if (arg < 0.0)
        throw Error(errc::negative_sqrt_argument,
                    "h*log term + log(4/delta) = " + std::to_string(arg) + " is negative");
    return 2.0 * std::sqrt(2.0 * arg / n) + inp.theta1 + inp.theta2 + inp.theta3 + inp.theta4;
}

} // namespace hackint
