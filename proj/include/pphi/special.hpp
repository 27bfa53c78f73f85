#pragma once

namespace pphi {

// Regularized incomplete gamma functions, P(a,x) + Q(a,x) = 1.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// log of the upper incomplete gamma integral over [x, inf).
double log_gamma_upper(double a, double x);

// log of the complete gamma function (thin wrapper kept for symmetry).
double log_gamma(double a);

} // namespace pphi
