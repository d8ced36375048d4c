#pragma once

// Regularized incomplete gamma / beta functions and the distribution tails
// built on them (chi-square survival, two-sided Student t).  Accuracy target
// is ~1e-13 relative over the parameter ranges used by the test statistics.

namespace cohortsim::stat {

// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double regularized_gamma_p(double s, double x);

// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x).
double regularized_gamma_q(double s, double x);

// Regularized incomplete beta I_x(a, b), a > 0, b > 0, x in [0, 1].
double regularized_beta(double a, double b, double x);

// P(X > x) for X ~ chi-square with `df` degrees of freedom.
double chi_square_survival(double x, double df);

// Two-sided p-value of a Student t statistic with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace cohortsim::stat
