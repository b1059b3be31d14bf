#pragma once
// Regularized incomplete beta and the Fisher-Snedecor F distribution.

namespace btcmine::stats {

/// I_x(a, b) for a, b > 0 and x in [0, 1]. Continued fraction (modified
/// Lentz), evaluated on whichever of I_x(a,b) and 1 - I_{1-x}(b,a)
/// converges faster.
double incomplete_beta(double a, double b, double x);

/// P(F > f) for F ~ F(d1, d2).
double f_upper_tail(double f, double d1, double d2);

/// P(F <= f).
double f_cdf(double f, double d1, double d2);

/// The f with P(F > f) = alpha, by bisection on the tail.
double f_upper_quantile(double alpha, double d1, double d2);

}  // namespace btcmine::stats
