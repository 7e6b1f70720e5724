#pragma once

namespace hackint::stats {

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma function P(a, x).
double incomplete_gamma_lower(double a, double x);

double student_t_cdf(double t, double df);
double chi_square_cdf(double x, double df);

// Inverse CDFs by bracketed bisection on the functions above; |cdf(q) - p|
// resolved until the bracket is below 1e-12 in the argument.
double student_t_quantile(double p, double df);
double chi_square_quantile(double p, double df);

// Mean of a chi distribution with k degrees of freedom, sqrt(2)*G((k+1)/2)/G(k/2),
// evaluated through log-gamma.
double chi_mean(double k);

} // namespace hackint::stats
