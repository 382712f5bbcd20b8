#pragma once

namespace funreg {

// Standard normal CDF.
double normal_cdf(double x);

// Standard normal quantile (inverse CDF), p in (0, 1).
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace funreg
