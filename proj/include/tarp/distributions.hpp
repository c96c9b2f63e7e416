#pragma once

// Scalar distribution functions needed for predictive intervals and the probit sampler.

namespace tarp::dist {

double normal_cdf(double x) noexcept;
double normal_pdf(double x) noexcept;
/// Inverse standard normal CDF, p in (0, 1).
double normal_quantile(double p);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// x with I_x(a, b) = p; Newton steps inside a shrinking bisection bracket.
double inverse_incomplete_beta(double a, double b, double p);

double student_t_pdf(double t, double df) noexcept;
double student_t_cdf(double t, double df);
/// Quantile of the Student-t with (possibly non-integer) df > 0, p in (0, 1).
double student_t_quantile(double p, double df);

}  // namespace tarp::dist
