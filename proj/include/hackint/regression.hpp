#pragma once

#include <optional>

#include "hackint/types.hpp"

namespace hackint {

// Least-squares fit of y on X (optionally augmented with the treatment
// column as the last coordinate). Carries everything the closed-form
// interval bounds need: coefficients, minimum loss, the inverse Gram
// matrix, its treatment diagonal entry, and the treatment-on-covariates
// regression.
struct OlsFit {
    VectorXd beta_ls;                 // coefficients on the covariates
    std::optional<double> beta0_ls;   // treatment coefficient, when fitted
    double sse = 0.0;                 // minimum quadratic loss
    MatrixXd gram_inv;                // (X'X)^-1, or the augmented version
    std::optional<double> v_tt;       // treatment diagonal of the augmented inverse
    std::optional<VectorXd> gamma_ls; // treatment regressed on covariates
    Eigen::Index n = 0;
    Eigen::Index p = 0;               // covariate count, treatment excluded

    bool has_treatment() const { return beta0_ls.has_value(); }
};

// SingularGram is raised when the reciprocal condition estimate of the
// design falls below this threshold.
inline constexpr double kGramRcondThreshold = 1e-12;

OlsFit fit_ols(const Dataset& data, bool include_treatment);

// Quadratic loss of a full coefficient vector on the dataset used for the
// fit. `coeffs` is [covariates] or [covariates, treatment].
double ols_loss(const Dataset& data, const VectorXd& coeffs, bool include_treatment);

// Tethered interval for the treatment coefficient. Witnesses are full
// coefficient vectors laid out as [covariates..., treatment].
HackingInterval ate_interval(const OlsFit& fit, double theta);

// Tethered interval for the prediction x_new'beta. Witnesses are coefficient
// vectors of length p.
HackingInterval prediction_interval(const OlsFit& fit, const VectorXd& x_new, double theta);

// Individual treatment effect at x_new: separately tethered treated and
// control regressions, combined as max/min over the four predictions.
// Witnesses concatenate [treated coefficients, control coefficients].
HackingInterval ite_interval(const Dataset& treated, const Dataset& control,
                             const VectorXd& x_new, double theta_t, double theta_c);

// theta infinitesimally below the minimum loss is treated as the minimum
// loss; anything further below raises ThetaBelowMinLoss.
double clamp_theta(double theta, double min_loss);

} // namespace hackint
