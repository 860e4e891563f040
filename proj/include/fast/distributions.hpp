#pragma once

namespace fast {

/// Standard normal lower-tail probability P(Z <= z).
double normal_cdf(double z);

/// Upper-tail probability P(T > x) of Student's t with `df` degrees of
/// freedom. Non-integer df is accepted (Welch tests produce it).
double t_sf(double x, double df);

/// Upper-tail probability P(X > x) of the chi-square distribution.
double chi_square_sf(double x, int df);

// Special functions backing the distributions above.
double log_gamma(double x);
double regularized_beta(double a, double b, double x);
double regularized_gamma_q(double a, double x);

}  // namespace fast
