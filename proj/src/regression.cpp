#include "hackint/regression.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>

namespace hackint {

namespace {

// Reciprocal condition estimate from singular values of the design.
double design_rcond(const MatrixXd& m) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0.0;
    return sv(sv.size() - 1) / sv(0);
}

MatrixXd augmented_design(const Dataset& data, bool include_treatment) {
    if (!include_treatment) return data.x;
    MatrixXd xt(data.x.rows(), data.x.cols() + 1);
    xt.leftCols(data.x.cols()) = data.x;
    xt.col(data.x.cols()) = *data.w;
    return xt;
}

} // namespace

double clamp_theta(double theta, double min_loss) {
    if (theta >= min_loss) return theta;
    if (theta >= min_loss - 1e-12 * (1.0 + min_loss)) return min_loss;
    throw Error(errc::theta_below_min_loss,
                "theta " + std::to_string(theta) + " below minimum loss " + std::to_string(min_loss));
}

OlsFit fit_ols(const Dataset& data, bool include_treatment) {
    data.validate();
    if (include_treatment && !data.w)
        throw Error(errc::missing_treatment, "dataset has no treatment column");

    const MatrixXd design = augmented_design(data, include_treatment);
    const Eigen::Index q = design.cols();
    if (data.n() <= q)
        throw Error(errc::dimension_mismatch,
                    "need n > number of fitted coefficients (" + std::to_string(q) + ")");

    if (design_rcond(design) < kGramRcondThreshold)
        throw Error(errc::singular_gram, "design matrix is numerically rank-deficient");

    Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
    const VectorXd coeffs = qr.solve(data.y);
    const VectorXd resid = data.y - design * coeffs;

    // (X'X)^-1 = P R^-1 R^-T P' from the same orthogonal decomposition.
    const MatrixXd r = qr.matrixR().topLeftCorner(q, q).triangularView<Eigen::Upper>();
    const MatrixXd perm = qr.colsPermutation();
    const MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(q, q));
    MatrixXd gram_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();
    gram_inv = 0.5 * (gram_inv + gram_inv.transpose());

    OlsFit fit;
    fit.n = data.n();
    fit.p = data.p();
    fit.sse = resid.squaredNorm();
    fit.gram_inv = gram_inv;
    if (include_treatment) {
        fit.beta_ls = coeffs.head(data.p());
        fit.beta0_ls = coeffs(data.p());
        fit.v_tt = gram_inv(data.p(), data.p());
        if (*fit.v_tt <= 0.0)
            throw Error(errc::singular_gram, "treatment diagonal of the Gram inverse is not positive");
        // gamma: treatment regressed on the covariates alone.
        Eigen::ColPivHouseholderQR<MatrixXd> qr_x(data.x);
        if (design_rcond(data.x) < kGramRcondThreshold)
            throw Error(errc::singular_gram, "covariate block is numerically rank-deficient");
        fit.gamma_ls = VectorXd(qr_x.solve(*data.w));
    } else {
        fit.beta_ls = coeffs;
    }
    return fit;
}

double ols_loss(const Dataset& data, const VectorXd& coeffs, bool include_treatment) {
    const MatrixXd design = augmented_design(data, include_treatment);
    if (coeffs.size() != design.cols())
        throw Error(errc::dimension_mismatch, "coefficient vector length does not match design");
    return (data.y - design * coeffs).squaredNorm();
}

HackingInterval ate_interval(const OlsFit& fit, double theta) {
    if (!fit.has_treatment())
        throw Error(errc::missing_treatment, "fit has no treatment coefficient");
    theta = clamp_theta(theta, fit.sse);

    const double half = std::sqrt(*fit.v_tt) * std::sqrt(theta - fit.sse);
    const double b0 = *fit.beta0_ls;

    // beta_ls holds the covariate block of the augmented fit; adding
    // (b0 - beta0_star) * gamma recovers the y-on-X solution shifted per
    // the optimality manifold beta = beta_ls_xonly - beta0_star * gamma.
    auto witness_for = [&](double beta0_star) {
        VectorXd wit(fit.p + 1);
        wit.head(fit.p) = fit.beta_ls + (b0 - beta0_star) * (*fit.gamma_ls);
        wit(fit.p) = beta0_star;
        return wit;
    };

    HackingInterval out;
    out.theta = theta;
    out.stat_at_min_loss = b0;
    out.lower = b0 - half;
    out.upper = b0 + half;
    out.witness_lower = witness_for(out.lower);
    out.witness_upper = witness_for(out.upper);
    out.witness_layout = "covariates+treatment";
    return out;
}

HackingInterval prediction_interval(const OlsFit& fit, const VectorXd& x_new, double theta) {
    if (x_new.size() != fit.beta_ls.size())
        throw Error(errc::dimension_mismatch, "x_new length does not match coefficient count");
    if (fit.has_treatment())
        throw Error(errc::invalid_config, "prediction interval expects a fit without treatment column");
    theta = clamp_theta(theta, fit.sse);

    const VectorXd upsilon = fit.gram_inv * x_new;
    const double quad = x_new.dot(upsilon); // == ||X upsilon||^2
    const double base = x_new.dot(fit.beta_ls);

    HackingInterval out;
    out.theta = theta;
    out.stat_at_min_loss = base;
    out.witness_layout = "coefficients";
    if (quad <= 0.0 || theta == fit.sse) {
        out.lower = out.upper = base;
        out.witness_lower = out.witness_upper = fit.beta_ls;
        return out;
    }

    const double half = std::sqrt(theta - fit.sse) * std::sqrt(quad);
    const double mu_tilde = std::sqrt(theta - fit.sse) / std::sqrt(quad);

    // Both quadratic-formula branches, labeled by the value they attain.
    const VectorXd cand_a = fit.beta_ls - mu_tilde * upsilon;
    const VectorXd cand_b = fit.beta_ls + mu_tilde * upsilon;
    const double val_a = x_new.dot(cand_a);
    const double val_b = x_new.dot(cand_b);

    out.lower = base - half;
    out.upper = base + half;
    if (val_a <= val_b) {
        out.witness_lower = cand_a;
        out.witness_upper = cand_b;
    } else {
        out.witness_lower = cand_b;
        out.witness_upper = cand_a;
    }
    return out;
}

HackingInterval ite_interval(const Dataset& treated, const Dataset& control,
                             const VectorXd& x_new, double theta_t, double theta_c) {
    OlsFit fit_t, fit_c;
    try {
        fit_t = fit_ols(treated, false);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("treated arm: ") + e.what());
    }
    try {
        fit_c = fit_ols(control, false);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("control arm: ") + e.what());
    }

    HackingInterval iv_t, iv_c;
    try {
        iv_t = prediction_interval(fit_t, x_new, theta_t);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("treated arm: ") + e.what());
    }
    try {
        iv_c = prediction_interval(fit_c, x_new, theta_c);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("control arm: ") + e.what());
    }

    HackingInterval out;
    out.theta = iv_t.theta; // per-arm thetas; the control arm's rides in the witnesses
    out.stat_at_min_loss = iv_t.stat_at_min_loss - iv_c.stat_at_min_loss;
    out.upper = iv_t.upper - iv_c.lower;
    out.lower = iv_t.lower - iv_c.upper;

    const auto concat = [](const VectorXd& a, const VectorXd& b) {
        VectorXd v(a.size() + b.size());
        v << a, b;
        return v;
    };
    out.witness_lower = concat(iv_t.witness_lower, iv_c.witness_upper);
    out.witness_upper = concat(iv_t.witness_upper, iv_c.witness_lower);
    out.witness_layout = "treated coefficients+control coefficients";
    return out;
}

} // namespace hackint
