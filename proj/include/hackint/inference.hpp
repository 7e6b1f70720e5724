#pragma once

#include <optional>

#include "hackint/regression.hpp"
#include "hackint/types.hpp"

namespace hackint {

// Declarative loss-budget policy, resolved to a numeric theta against a
// concrete minimum loss (and, for the classical and sign-flip policies, a
// least-squares fit context).
struct LossBudget {
    enum class Policy { absolute, relative_to_min, classical_alpha, sign_flip };
    Policy policy = Policy::relative_to_min;
    double value = 0.0; // theta for absolute, r for relative, alpha for classical

    static LossBudget absolute(double theta) { return {Policy::absolute, theta}; }
    static LossBudget relative_to_min(double r);
    static LossBudget classical_alpha(double alpha);
    static LossBudget sign_flip() { return {Policy::sign_flip, 0.0}; }
};

double resolve_theta(const LossBudget& budget, double min_loss,
                     const OlsFit* fit_context = nullptr);

struct CiEquivalenceReport {
    HackingInterval hacking;
    double classical_lower = 0.0;
    double classical_upper = 0.0;
    double theta = 0.0;
    double max_abs_gap = 0.0;
};

enum class CiKind { ate, prediction };

// Hacking interval at theta = SSE(1 + t^2/(n-p-1)) against the textbook
// t-interval for the same target.
CiEquivalenceReport classical_ci_equivalence_check(const OlsFit& fit, double alpha,
                                                   CiKind kind,
                                                   const std::optional<VectorXd>& x_new = {});

// Variance of either ATE interval bound when Y ~ N(X~ beta, sigma^2 I) and
// theta = (1+r) SSE: sigma^2 V_tt (1 + r(n-p-1 - mu^2)).
double ate_bound_variance(double sigma2, double v_tt, double r, int n, int p);

struct ProfileSpec {
    double log_lp_max = 0.0; // maximized profile log-likelihood
    int m = 1;               // degrees-of-freedom difference
    double alpha = 0.05;
};

// Profile-likelihood threshold log Lp(max) - chi2_{m,1-alpha}/2, and its
// negation as a loss threshold for tethering under loss = -log likelihood.
double profile_theta(const ProfileSpec& spec);
double loss_threshold_from_profile(double theta_p);

struct GenBoundInput {
    int h = 1;      // VC dimension
    int n = 1;      // sample count
    double delta = 0.05;
    double theta1 = 0.0, theta2 = 0.0, theta3 = 0.0, theta4 = 0.0;
};

// Which ratio sits inside the VC log term. h_over_n is the default
// (log(2eh/n)); n_over_h (log(2en/h)) is the conventional growth-function
// form, offered behind this flag because the default can make the sqrt
// argument negative for small h.
enum class VcLogForm { h_over_n, n_over_h };

double generalization_bound(const GenBoundInput& inp, VcLogForm form = VcLogForm::h_over_n);

} // namespace hackint
